#include "rovlock/bench/report.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include <fmt/format.h>

namespace rovlock::bench {

namespace {

constexpr const char* kCsvHeader =
    "object,mode,tracker,frames,failed,fail_frame,pos_med,pos_q1,pos_q3,pos_min,pos_max,"
    "yaw_med,yaw_q1,yaw_q3,yaw_min,yaw_max";

std::string mode_label(DisturbanceMode mode) {
  switch (mode) {
    case DisturbanceMode::None: return "No Disturbance";
    case DisturbanceMode::Bubbles: return "Bubbles";
    case DisturbanceMode::Positional: return "With disturbance";
  }
  return "";
}

std::string px(double v) { return fmt::format("{:.3f}", v); }
std::string rad(double v) { return fmt::format("{:.4f}", v); }

}  // namespace

std::vector<Experiment> table_experiments() {
  std::vector<Experiment> out;
  for (auto mode : {DisturbanceMode::None, DisturbanceMode::Bubbles, DisturbanceMode::Positional})
    for (auto object : {SceneObject::Structure, SceneObject::Ladder}) out.emplace_back(object, mode);
  return out;
}

const Cell* Report::find(SceneObject object, DisturbanceMode mode, TrackerKind tracker) const {
  for (const auto& c : cells)
    if (c.object == object && c.mode == mode && c.tracker == tracker) return &c;
  return nullptr;
}

Report run_matrix(const MatrixConfig& config) {
  config.base.validate();
  Report report;
  for (const auto& e : table_experiments())
    if (std::find(config.objects.begin(), config.objects.end(), e.first) != config.objects.end() &&
        std::find(config.modes.begin(), config.modes.end(), e.second) != config.modes.end())
      report.experiments.push_back(e);
  report.trackers = config.trackers;
  for (const auto& [object, mode] : report.experiments)
    for (TrackerKind kind : report.trackers) report.cells.push_back({object, mode, kind, {}, 0});

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(report.cells.size());
  const auto worker = [&] {
    for (std::size_t i = next++; i < report.cells.size(); i = next++) {
      Cell& cell = report.cells[i];
      ExperimentSpec spec = config.base;
      spec.object = cell.object;
      spec.mode = cell.mode;
      spec.tracker = cell.tracker;
      try {
        const RunLog log = run_experiment(spec);
        cell.stats = summarize(log);
        cell.frames_run = static_cast<int>(log.frames.size());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto threads = std::min<std::size_t>(config.threads > 0 ? config.threads : hw, report.cells.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return report;
}

TrackerAverage tracker_average(const Report& report, TrackerKind tracker) {
  TrackerAverage avg;
  int n = 0;
  for (const auto& c : report.cells) {
    if (c.tracker != tracker) continue;
    if (c.stats.failed) avg.failed = true;
    avg.position += c.stats.position.median;
    avg.yaw += c.stats.yaw.median;
    ++n;
  }
  if (n > 0) {
    avg.position /= n;
    avg.yaw /= n;
  }
  return avg;
}

std::string results_csv(const Report& report) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& c : report.cells) {
    const auto& s = c.stats;
    out += fmt::format("{},{},{},{},{},{}", sim::object_name(c.object), sim::mode_name(c.mode),
                       tracking::tracker_name(c.tracker), c.frames_run, s.failed ? "true" : "false",
                       s.failed ? std::to_string(s.fail_frame) : "");
    if (s.failed) {
      out += ",,,,,,,,,,\n";
      continue;
    }
    out += fmt::format(",{},{},{},{},{},{},{},{},{},{}\n", px(s.position.median), px(s.position.q1),
                       px(s.position.q3), px(s.position.min), px(s.position.max), rad(s.yaw.median),
                       rad(s.yaw.q1), rad(s.yaw.q3), rad(s.yaw.min), rad(s.yaw.max));
  }
  return out;
}

std::string table_markdown(const Report& report) {
  std::string out;
  const auto header = [&](const std::string& title) {
    out += "| " + title + " |";
    for (TrackerKind k : report.trackers) out += fmt::format(" {} |", tracking::tracker_label(k));
    out += "\n|---|";
    for (std::size_t i = 0; i < report.trackers.size(); ++i) out += "---|";
    out += "\n";
  };
  for (const bool yaw : {false, true}) {
    header(yaw ? "Experiments - Yaw angle error (rad)" : "Experiments - Position error (px)");
    int row = 1;
    for (const auto& [object, mode] : report.experiments) {
      out += fmt::format("| {}) {} - {} |", row++, sim::object_label(object), mode_label(mode));
      for (TrackerKind k : report.trackers) {
        const Cell* c = report.find(object, mode, k);
        if (c == nullptr || c->stats.failed) {
          out += " FAIL |";
          continue;
        }
        out += " " + (yaw ? rad(c->stats.yaw.median) : fmt::format("{:.1f}", c->stats.position.median)) + " |";
      }
      out += "\n";
    }
    out += "| Average: |";
    for (TrackerKind k : report.trackers) {
      const TrackerAverage a = tracker_average(report, k);
      out += a.failed ? std::string(" FAIL |")
                      : " " + (yaw ? rad(a.yaw) : fmt::format("{:.1f}", a.position)) + " |";
    }
    out += "\n\n";
  }
  return out;
}

std::string box_plot_name(SceneObject object, DisturbanceMode mode) {
  return fmt::format("boxplot_{}_{}.svg", sim::object_name(object), sim::mode_name(mode));
}

std::string box_plot_svg(const Report& report, SceneObject object, DisturbanceMode mode) {
  constexpr double kW = 760, kH = 380, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;
  double top_value = 1.0;
  for (TrackerKind k : report.trackers)
    if (const Cell* c = report.find(object, mode, k); c && !c->stats.failed)
      top_value = std::max(top_value, c->stats.position.max);
  top_value *= 1.1;
  const auto y_of = [&](double v) { return kTop + (kH - kTop - kBottom) * (1.0 - v / top_value); };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" data-ymax=\"{:.6f}\" "
      "data-plot-top=\"{}\" data-plot-bottom=\"{}\">\n",
      kW, kH, top_value, kTop, kH - kBottom);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">{} - {}: position error (px)</text>\n",
                     kLeft, sim::object_label(object), mode_label(mode));
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kLeft, kTop, kH - kBottom);
  for (int i = 0; i <= 4; ++i) {
    const double v = top_value * i / 4.0;
    out += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.1f}</text>\n",
                       kLeft - 6, y_of(v) + 4, v);
  }
  const double slot = (kW - kLeft - kRight) / std::max<std::size_t>(1, report.trackers.size());
  for (std::size_t i = 0; i < report.trackers.size(); ++i) {
    const TrackerKind k = report.trackers[i];
    const double cx = kLeft + slot * (i + 0.5);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                       cx, kH - kBottom + 20, tracking::tracker_label(k));
    const Cell* c = report.find(object, mode, k);
    if (c == nullptr || c->stats.failed) {
      out += fmt::format("<text class=\"fail\" data-tracker=\"{}\" x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" "
                         "font-size=\"13\" fill=\"#b00\" text-anchor=\"middle\">FAIL</text>\n",
                         tracking::tracker_name(k), cx, 0.5 * (kTop + kH - kBottom));
      continue;
    }
    const OrderStats& s = c->stats.position;
    const double half = 0.3 * slot;
    out += fmt::format("<g class=\"box\" data-tracker=\"{}\" data-min=\"{}\" data-q1=\"{}\" data-median=\"{}\" "
                       "data-q3=\"{}\" data-max=\"{}\">\n",
                       tracking::tracker_name(k), px(s.min), px(s.q1), px(s.median), px(s.q3), px(s.max));
    out += fmt::format("<line class=\"whisker\" x1=\"{0:.2f}\" y1=\"{1:.3f}\" x2=\"{0:.2f}\" y2=\"{2:.3f}\" stroke=\"black\"/>\n",
                       cx, y_of(s.min), y_of(s.max));
    for (double v : {s.min, s.max})
      out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.3f}\" x2=\"{:.2f}\" y2=\"{:.3f}\" stroke=\"black\"/>\n",
                         cx - 0.5 * half, y_of(v), cx + 0.5 * half, y_of(v));
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.3f}\" width=\"{:.2f}\" height=\"{:.3f}\" fill=\"#9cc3e6\" stroke=\"black\"/>\n",
                       cx - half, y_of(s.q3), 2 * half, y_of(s.q1) - y_of(s.q3));
    out += fmt::format("<line class=\"median\" x1=\"{:.2f}\" y1=\"{:.3f}\" x2=\"{:.2f}\" y2=\"{:.3f}\" stroke=\"black\" stroke-width=\"2\"/>\n",
                       cx - half, y_of(s.median), cx + half, y_of(s.median));
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error(Errc::IoError, "failed writing " + path.string());
}

void emit_report(const Report& report, const std::filesystem::path& dir) {
  if (report.cells.empty()) throw Error(Errc::EmptyLog, "report has no runs");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "results.csv", results_csv(report));
  write_text(dir / "table.md", table_markdown(report));
  for (const auto& [object, mode] : report.experiments)
    write_text(dir / box_plot_name(object, mode), box_plot_svg(report, object, mode));
}

}  // namespace rovlock::bench
