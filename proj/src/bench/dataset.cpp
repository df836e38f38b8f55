#include "rovlock/bench/dataset.hpp"
#include "rovlock/bench/report.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace rovlock::bench {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void malformed(const fs::path& where, const std::string& what) {
  throw Error(Errc::MalformedDataset, where.string() + ": " + what);
}

std::string frame_name(int index) { return fmt::format("{:06d}.png", index); }

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::vector<std::string>& header) {
  std::ifstream f(path);
  if (!f) malformed(path, "missing");
  std::string line;
  if (!std::getline(f, line)) malformed(path, "empty");
  const auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split(line) != header) malformed(path, "unexpected header '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != header.size()) malformed(path, "row with " + std::to_string(cells.size()) + " fields");
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_double(const std::string& s, const fs::path& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) malformed(where, "bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    malformed(where, "bad number '" + s + "'");
  }
}

BBox to_box(const std::vector<std::string>& cells, std::size_t from, const fs::path& where) {
  const BBox b{to_double(cells[from], where), to_double(cells[from + 1], where), to_double(cells[from + 2], where),
               to_double(cells[from + 3], where)};
  if (!(b.w > 0.0 && b.h > 0.0)) malformed(where, "box without area");
  return b;
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

void write_png(const fs::path& path, const Frame& frame) {
  if (frame.channels() != 1 && frame.channels() != 3)
    throw Error(Errc::InvalidChannelCount, "png needs 1 or 3 channels");
  std::vector<png_byte> bytes(frame.data().size());
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = static_cast<png_byte>(std::lround(std::clamp(frame.data()[i], 0.0, 1.0) * 255.0));
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width());
  image.height = static_cast<png_uint_32>(frame.height());
  image.format = frame.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr))
    throw Error(Errc::IoError, path.string() + ": " + image.message);
}

Frame read_png(const fs::path& path) {
  if (!fs::exists(path)) throw Error(Errc::IoError, path.string() + ": no such file");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) malformed(path, image.message);
  const bool colour = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) malformed(path, image.message);
  std::vector<double> data(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) data[i] = bytes[i] / 255.0;
  return Frame::from_data(static_cast<int>(image.width), static_cast<int>(image.height), colour ? 3 : 1,
                          std::move(data));
}

RunLog export_run(const ExperimentSpec& spec, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::string telemetry = "frame,timestamp_s,yaw_rad\n";
  std::string truth = "frame,x,y,w,h\n";
  const auto sink = [&](int k, const Frame& frame, const RovState& state, const BBox& box) {
    write_png(dir / frame_name(k), frame);
    telemetry += fmt::format("{},{},{}\n", k, g17(k / spec.fps), g17(state.position[3]));
    truth += fmt::format("{},{},{},{},{}\n", k, g17(box.x), g17(box.y), g17(box.w), g17(box.h));
  };
  RunLog log = run_experiment(spec, sink);
  write_text(dir / "telemetry.csv", telemetry);
  write_text(dir / "ground_truth.csv", truth);
  write_text(dir / "roi.csv",
             fmt::format("x,y,w,h\n{},{},{},{}\n", g17(log.roi.x), g17(log.roi.y), g17(log.roi.w), g17(log.roi.h)));
  return log;
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) malformed(dir, "not a directory");
  Dataset data;
  for (const auto& row : read_csv(dir / "telemetry.csv", {"frame", "timestamp_s", "yaw_rad"})) {
    const fs::path where = dir / "telemetry.csv";
    TelemetryRow t{static_cast<int>(to_double(row[0], where)), to_double(row[1], where), to_double(row[2], where)};
    if (t.frame != static_cast<int>(data.telemetry.size())) malformed(where, "frames out of sequence");
    data.telemetry.push_back(t);
  }
  if (data.telemetry.empty()) malformed(dir / "telemetry.csv", "no rows");
  const auto roi = read_csv(dir / "roi.csv", {"x", "y", "w", "h"});
  if (roi.size() != 1) malformed(dir / "roi.csv", "expected one row");
  data.roi = to_box(roi[0], 0, dir / "roi.csv");
  for (const auto& t : data.telemetry) {
    fs::path p = dir / frame_name(t.frame);
    if (!fs::exists(p)) malformed(p, "missing frame");
    data.frames.push_back(std::move(p));
  }
  if (fs::exists(dir / "ground_truth.csv")) {
    std::vector<BBox> gt;
    for (const auto& row : read_csv(dir / "ground_truth.csv", {"frame", "x", "y", "w", "h"}))
      gt.push_back(to_box(row, 1, dir / "ground_truth.csv"));
    if (gt.size() != data.frames.size()) malformed(dir / "ground_truth.csv", "row count differs from telemetry");
    data.ground_truth = std::move(gt);
  }
  return data;
}

ReplayResult replay_dataset(const Dataset& data, TrackerKind kind, const tracking::TrackerConfig& config,
                            double fps) {
  if (data.frames.empty()) throw Error(Errc::EmptyLog, "dataset has no frames");
  if (data.telemetry.size() != data.frames.size())
    throw Error(Errc::MalformedDataset, "telemetry and frame counts differ");
  auto tracker = tracking::create_tracker(kind, config);
  FailureMonitor monitor(kind, fps);
  ReplayResult out;
  const double yaw0 = data.telemetry[0].yaw;
  std::vector<double> pos, yaw;
  for (std::size_t k = 0; k < data.frames.size(); ++k) {
    const Frame frame = read_png(data.frames[k]);
    tracking::TrackResult r;
    if (k == 0) {
      tracker->init(frame, data.roi);
      r = {data.roi, 1.0, TrackStatus::Tracking};
    } else {
      if (data.ground_truth) tracker->supply_ground_truth((*data.ground_truth)[k]);
      r = tracker->update(frame);
    }
    const Deviation dev = control::compute_deviation(data.roi, r.bbox, yaw0, data.telemetry[k].yaw);
    out.results.push_back(r);
    out.deviations.push_back(dev);
    if (out.stats.failed) continue;  // keep tracking, the statistics stop here
    const bool lost = r.lost() || (data.ground_truth && vision::intersection_area(r.bbox, (*data.ground_truth)[k]) <= 0.0);
    if (monitor.observe(static_cast<int>(k), lost)) {
      out.stats.failed = true;
      out.stats.fail_frame = monitor.fail_frame();
      continue;
    }
    if (k == 0) continue;
    pos.push_back(position_error(dev));
    yaw.push_back(std::abs(dev.dpsi));
  }
  if (pos.empty()) {
    for (const auto& d : out.deviations) {
      pos.push_back(position_error(d));
      yaw.push_back(std::abs(d.dpsi));
    }
  }
  out.stats.frames = static_cast<int>(pos.size());
  out.stats.position = order_stats(pos);
  out.stats.yaw = order_stats(yaw);
  return out;
}

}  // namespace rovlock::bench
