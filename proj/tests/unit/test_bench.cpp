#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "rovlock/bench/config.hpp"
#include "rovlock/bench/dataset.hpp"
#include "rovlock/bench/report.hpp"
#include "support/tempdir.hpp"

using namespace rovlock;
using namespace rovlock::bench;
using rovlock::testing::TempDir;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

// Hand-made log with the given true position errors along x, one per frame.
RunLog log_with_errors(const std::vector<double>& errors) {
  RunLog log;
  log.spec.fps = 15.0;
  log.stats_from = 0.0;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    FrameRecord f;
    f.index = static_cast<int>(k);
    f.t = k / 15.0;
    f.true_deviation.dx = errors[k];
    f.true_deviation.dpsi = -0.01 * errors[k];
    log.frames.push_back(f);
  }
  return log;
}

ExperimentSpec short_spec(SceneObject object, DisturbanceMode mode, TrackerKind tracker, int frames) {
  ExperimentSpec s;
  s.object = object;
  s.mode = mode;
  s.tracker = tracker;
  s.duration = frames / s.fps;
  return s;
}

Cell synthetic_cell(SceneObject o, DisturbanceMode m, TrackerKind k, double base, bool failed) {
  Cell c{o, m, k, {}, 900};
  c.stats.position = {base, 0.5 * base, 1.5 * base, 0.1 * base, 3.0 * base};
  c.stats.yaw = {0.01 * base, 0.005 * base, 0.015 * base, 0.0, 0.03 * base};
  c.stats.failed = failed;
  c.stats.fail_frame = failed ? 42 : -1;
  c.stats.frames = failed ? 41 : 899;
  return c;
}

Report synthetic_report() {
  Report r;
  r.experiments = table_experiments();
  r.trackers = {tracking::kBenchmarkTrackers.begin(), tracking::kBenchmarkTrackers.end()};
  double base = 1.0;
  for (const auto& [o, m] : r.experiments)
    for (auto k : r.trackers) {
      const bool failed = m == DisturbanceMode::Bubbles && o == SceneObject::Structure && k == TrackerKind::MIL;
      r.cells.push_back(synthetic_cell(o, m, k, base, failed));
      base += 0.37;
    }
  return r;
}

}  // namespace

TEST_CASE("position error") {
  CHECK(position_error({0, 0, 0, 0}) == 0.0);
  CHECK(position_error({3, 4, 0, 0}) == doctest::Approx(5.0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-200.0, 200.0);
  for (int i = 0; i < 100; ++i) {
    Deviation d{u(rng), u(rng), u(rng), u(rng)};
    CHECK(position_error(d) == doctest::Approx(std::sqrt(d.dx * d.dx + d.dy * d.dy)).epsilon(1e-12));
  }
}

TEST_CASE("order statistics") {
  const OrderStats s = order_stats({5, 1, 4, 2, 3});
  CHECK(s.median == 3.0);
  CHECK(s.min == 1.0);
  CHECK(s.max == 5.0);
  CHECK(s.q1 == 2.0);
  CHECK(s.q3 == 4.0);

  const OrderStats c = order_stats(std::vector<double>(17, 2.0));
  for (double v : {c.min, c.q1, c.median, c.q3, c.max}) CHECK(v == 2.0);

  // Linear interpolation at rank q (n - 1), written out independently.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int n : {2, 3, 8, 51}) {
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const auto at = [&](double q) {
      const double r = q * (n - 1);
      const int i = static_cast<int>(r);
      return i + 1 < n ? sorted[i] * (1 - (r - i)) + sorted[i + 1] * (r - i) : sorted[i];
    };
    const OrderStats o = order_stats(v);
    CHECK(o.median == doctest::Approx(at(0.5)));
    CHECK(o.q1 == doctest::Approx(at(0.25)));
    CHECK(o.q3 == doctest::Approx(at(0.75)));
    CHECK(o.min <= o.q1);
    CHECK(o.q1 <= o.median);
    CHECK(o.median <= o.q3);
    CHECK(o.q3 <= o.max);
  }
  CHECK_THROWS_AS(order_stats({}), Error);
}

TEST_CASE("summaries") {
  SUBCASE("constant error") {
    const SummaryStats s = summarize(log_with_errors(std::vector<double>(30, 2.0)));
    for (double v : {s.position.min, s.position.q1, s.position.median, s.position.q3, s.position.max})
      CHECK(v == doctest::Approx(2.0));
    CHECK(!s.failed);
  }
  SUBCASE("failed run keeps only the frames before the failure") {
    RunLog log = log_with_errors({1, 2, 3, 4, 5, 100, 100});
    log.failed = true;
    log.fail_frame = 5;
    const SummaryStats s = summarize(log);
    CHECK(s.failed);
    CHECK(s.fail_frame == 5);
    CHECK(s.frames == 5);
    CHECK(s.position.median == doctest::Approx(3.0));
    CHECK(s.position.max == doctest::Approx(5.0));
    CHECK(s.yaw.median == doctest::Approx(0.03));
  }
  SUBCASE("settling frames are skipped") {
    RunLog log = log_with_errors({50, 50, 1, 1, 1});
    log.stats_from = 2 / 15.0;
    CHECK(summarize(log).position.max == doctest::Approx(1.0));
  }
  SUBCASE("empty log") {
    try {
      summarize(RunLog{});
      FAIL("expected EmptyLog");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::EmptyLog);
    }
  }
}

TEST_CASE("failure monitor") {
  FailureMonitor kcf(TrackerKind::KCF, 15.0);
  CHECK(!kcf.observe(0, false));
  CHECK(kcf.observe(1, true));
  CHECK(kcf.fail_frame() == 1);

  // 3 s at 15 fps: 45 lost frames are tolerated, the 46th is not.
  FailureMonitor tld(TrackerKind::TLD, 15.0);
  for (int k = 0; k < 45; ++k) CHECK(!tld.observe(10 + k, true));
  CHECK(!tld.observe(55, false));
  for (int k = 0; k < 45; ++k) CHECK(!tld.observe(60 + k, true));
  CHECK(tld.observe(105, true));
  CHECK(tld.fail_frame() == 60);
}

TEST_CASE("experiment spec validation") {
  ExperimentSpec s = short_spec(SceneObject::Structure, DisturbanceMode::None, TrackerKind::CSRT, 10);
  try {
    run_experiment(s);
    FAIL("expected InvalidSpec");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidSpec);
  }
  s.duration = 100 / 15.0;
  CHECK(s.frame_count() == 100);
  CHECK_NOTHROW(s.validate());
  s.fps = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("closed loop with the oracle") {
  const RunLog log =
      run_experiment(short_spec(SceneObject::Structure, DisturbanceMode::None, TrackerKind::OracleGroundTruth, 120));
  REQUIRE(log.frames.size() == 120);
  CHECK(!log.failed);
  const SummaryStats s = summarize(log);
  CHECK(s.position.median < 1.0);
  CHECK(log.roi.valid());
}

TEST_CASE("oracle is never worse than a tracker") {
  for (auto mode : {DisturbanceMode::Bubbles, DisturbanceMode::Positional}) {
    const auto oracle =
        summarize(run_experiment(short_spec(SceneObject::Ladder, mode, TrackerKind::OracleGroundTruth, 150)));
    const auto csrt = summarize(run_experiment(short_spec(SceneObject::Ladder, mode, TrackerKind::CSRT, 150)));
    CHECK(!oracle.failed);
    CHECK(oracle.position.median <= csrt.position.median + 1e-9);
  }
}

TEST_CASE("results csv and table") {
  const Report r = synthetic_report();
  REQUIRE(r.cells.size() == 42);
  const auto rows = lines(results_csv(r));
  REQUIRE(rows.size() == 43);
  CHECK(rows[0] ==
        "object,mode,tracker,frames,failed,fail_frame,pos_med,pos_q1,pos_q3,pos_min,pos_max,"
        "yaw_med,yaw_q1,yaw_q3,yaw_min,yaw_max");
  int failed_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    REQUIRE(cells.size() == 16);
    if (cells[4] == "true") {
      ++failed_rows;
      CHECK(cells[5] == "42");
      for (std::size_t c = 6; c < 16; ++c) CHECK(cells[c].empty());
    } else {
      CHECK(cells[5].empty());
      for (std::size_t c = 6; c < 16; ++c) CHECK(!cells[c].empty());
    }
  }
  CHECK(failed_rows == 1);

  const std::string md = table_markdown(r);
  CHECK(md.find("| 1) Structure - No Disturbance |") != std::string::npos);
  CHECK(md.find("| 6) Ladder - With disturbance |") != std::string::npos);
  CHECK(md.find("| 1) Structure - No Disturbance |") < md.find("| 2) Ladder - No Disturbance |"));
  CHECK(md.find("| 2) Ladder - No Disturbance |") < md.find("| 3) Structure - Bubbles |"));

  // MIL failed once, so its average is FAIL; CSRT's is the plain mean.
  CHECK(tracker_average(r, TrackerKind::MIL).failed);
  const TrackerAverage csrt = tracker_average(r, TrackerKind::CSRT);
  CHECK(!csrt.failed);
  double sum = 0.0;
  for (const auto& c : r.cells)
    if (c.tracker == TrackerKind::CSRT) sum += c.stats.position.median;
  CHECK(csrt.position == doctest::Approx(sum / 6.0));
}

TEST_CASE("box plot whiskers agree with the csv") {
  const Report r = synthetic_report();
  const auto rows = lines(results_csv(r));
  const std::regex root(R"re(data-ymax="([0-9.]+)" data-plot-top="([0-9.]+)" data-plot-bottom="([0-9.]+)")re");
  const std::regex group(R"re(<g class="box" data-tracker="(\w+)")re");
  const std::regex whisker(R"re(class="whisker" x1="[0-9.]+" y1="([0-9.]+)" x2="[0-9.]+" y2="([0-9.]+)")re");
  for (const auto& [object, mode] : r.experiments) {
    const std::string svg = box_plot_svg(r, object, mode);
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, root));
    const double ymax = std::stod(m[1]), top = std::stod(m[2]), bottom = std::stod(m[3]);
    const auto value_at = [&](double y) { return ymax * (bottom - y) / (bottom - top); };

    int boxes = 0;
    auto it = svg.cbegin();
    while (std::regex_search(it, svg.cend(), m, group)) {
      const std::string tracker = m[1];
      std::smatch w;
      REQUIRE(std::regex_search(m[0].second, svg.cend(), w, whisker));
      std::vector<std::string> row;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split(rows[i]);
        if (cells[0] == sim::object_name(object) && cells[1] == sim::mode_name(mode) && cells[2] == tracker) row = cells;
      }
      REQUIRE(row.size() == 16);
      CHECK(value_at(std::stod(w[1])) == doctest::Approx(std::stod(row[9])).epsilon(1e-3));
      CHECK(value_at(std::stod(w[2])) == doctest::Approx(std::stod(row[10])).epsilon(1e-3));
      ++boxes;
      it = w[0].second;
    }
    const bool has_fail = object == SceneObject::Structure && mode == DisturbanceMode::Bubbles;
    CHECK(boxes == (has_fail ? 6 : 7));
    CHECK((svg.find(">FAIL<") != std::string::npos) == has_fail);
  }
}

TEST_CASE("report files") {
  TempDir dir("report");
  const Report r = synthetic_report();
  emit_report(r, dir.path() / "out");
  CHECK(std::filesystem::exists(dir.path() / "out" / "results.csv"));
  CHECK(std::filesystem::exists(dir.path() / "out" / "table.md"));
  int svgs = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path() / "out"))
    if (e.path().extension() == ".svg") ++svgs;
  CHECK(svgs == 6);

  std::ofstream(dir.path() / "plain") << "x";
  try {
    emit_report(r, dir.path() / "plain" / "sub");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IoError);
  }
  CHECK_THROWS_AS(emit_report(Report{}, dir.path() / "empty"), Error);
}

TEST_CASE("matrix is deterministic and independent of the thread count") {
  MatrixConfig config;
  config.base.duration = 100 / 15.0;
  config.objects = {SceneObject::Ladder};
  config.modes = {DisturbanceMode::Bubbles};
  config.trackers = {TrackerKind::MOSSE, TrackerKind::KCF, TrackerKind::OracleGroundTruth};
  config.threads = 1;
  const std::string a = results_csv(run_matrix(config));
  config.threads = 3;
  const std::string b = results_csv(run_matrix(config));
  CHECK(a == b);
  CHECK(lines(a).size() == 4);
}

TEST_CASE("png round trip") {
  TempDir dir("png");
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> level(0, 255);
  for (int channels : {1, 3}) {
    vision::Frame f(13, 7, channels);
    for (auto& v : f.data()) v = level(rng) / 255.0;
    write_png(dir.path() / "f.png", f);
    CHECK(read_png(dir.path() / "f.png") == f);
  }
  std::ofstream(dir.path() / "junk.png") << "not a png";
  try {
    read_png(dir.path() / "junk.png");
    FAIL("expected MalformedDataset");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedDataset);
  }
  CHECK_THROWS_AS(read_png(dir.path() / "missing.png"), Error);
}

TEST_CASE("dataset validation") {
  TempDir dir("dataset");
  const auto expect_malformed = [&](const char* what) {
    INFO(what);
    try {
      load_dataset(dir.path());
      FAIL("expected MalformedDataset");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MalformedDataset);
    }
  };
  expect_malformed("no telemetry");
  write_png(dir.path() / "000000.png", vision::Frame(32, 32, 1, 0.5));
  write_png(dir.path() / "000001.png", vision::Frame(32, 32, 1, 0.5));
  write_text(dir.path() / "telemetry.csv", "frame,timestamp_s,yaw_rad\n0,0,0\n1,0.066,0\n");
  expect_malformed("no roi");
  write_text(dir.path() / "roi.csv", "x,y,w,h\n4,4,16,16\n");
  CHECK(load_dataset(dir.path()).frames.size() == 2);
  write_text(dir.path() / "telemetry.csv", "frame,timestamp_s,yaw_rad\n0,0,0\n1,0.066,0\n2,0.133,0\n");
  expect_malformed("telemetry names a frame that does not exist");
  write_text(dir.path() / "telemetry.csv", "frame,timestamp_s,yaw_rad\n0,0,0\n1,0.066,0\n");
  write_text(dir.path() / "ground_truth.csv", "frame,x,y,w,h\n0,4,4,16,16\n");
  expect_malformed("ground truth shorter than telemetry");
  std::filesystem::remove(dir.path() / "ground_truth.csv");
  write_text(dir.path() / "roi.csv", "x,y,w\n4,4,16\n");
  expect_malformed("bad roi header");
}

TEST_CASE("export and replay") {
  SUBCASE("oracle self-replay has no error") {
    TempDir dir("oracle");
    const auto spec = short_spec(SceneObject::Structure, DisturbanceMode::None, TrackerKind::OracleGroundTruth, 100);
    const RunLog log = export_run(spec, dir.path());
    const Dataset data = load_dataset(dir.path());
    REQUIRE(data.frames.size() == log.frames.size());
    const ReplayResult r = replay_dataset(data, TrackerKind::OracleGroundTruth, seeded_config(spec), spec.fps);
    CHECK(!r.stats.failed);
    CHECK(r.stats.position.median == 0.0);
    CHECK(r.stats.position.max == 0.0);
  }
  SUBCASE("csrt replay reproduces the closed-loop boxes") {
    TempDir dir("csrt");
    auto spec = short_spec(SceneObject::Structure, DisturbanceMode::Bubbles, TrackerKind::CSRT, 100);
    spec.seed = 7;
    const RunLog log = export_run(spec, dir.path());
    const ReplayResult r = replay_dataset(load_dataset(dir.path()), TrackerKind::CSRT, seeded_config(spec), spec.fps);
    REQUIRE(r.results.size() == log.frames.size());
    for (std::size_t k = 0; k < r.results.size(); ++k) {
      CHECK(r.results[k].bbox.x == log.frames[k].tracked.x);
      CHECK(r.results[k].bbox.y == log.frames[k].tracked.y);
      CHECK(r.results[k].bbox.w == log.frames[k].tracked.w);
      CHECK(r.results[k].bbox.h == log.frames[k].tracked.h);
    }
    CHECK(!r.stats.failed);
    CHECK(std::isfinite(r.stats.position.median));
  }
}

TEST_CASE("json config") {
  const ExperimentSpec s = parse_spec(R"({"object": "ladder", "mode": "bubbles", "tracker": "kcf",
                                          "duration": 12.5, "seed": 9, "roi": {"x": 1, "y": 2, "w": 30, "h": 40},
                                          "gains": {"kp": [1, 2, 3, 4]}})");
  CHECK(s.object == SceneObject::Ladder);
  CHECK(s.mode == DisturbanceMode::Bubbles);
  CHECK(s.tracker == TrackerKind::KCF);
  CHECK(s.duration == 12.5);
  CHECK(s.seed == 9);
  REQUIRE(s.roi);
  CHECK(s.roi->h == 40.0);
  CHECK(s.gains.kp[3] == 4.0);
  CHECK(s.gains.ki[0] == ExperimentSpec{}.gains.ki[0]);

  // Later layers override earlier ones field by field.
  const ExperimentSpec o = parse_spec(R"({"seed": 3})", s);
  CHECK(o.seed == 3);
  CHECK(o.tracker == TrackerKind::KCF);

  const MatrixConfig m = parse_matrix(R"({"duration": 10, "objects": ["ladder"], "trackers": ["csrt", "mil"], "threads": 2})");
  CHECK(m.base.duration == 10.0);
  CHECK(m.objects.size() == 1);
  CHECK(m.modes.size() == 3);
  CHECK(m.trackers == std::vector<TrackerKind>{TrackerKind::CSRT, TrackerKind::MIL});
  CHECK(m.threads == 2);

  for (const char* bad : {R"({"objekt": "ladder"})", R"({"tracker": "sift"})", R"([1, 2])", R"({"seed": "x"})",
                          R"({"gains": {"kp": [1, 2]}})", "{not json"}) {
    INFO(bad);
    try {
      parse_spec(bad);
      FAIL("expected InvalidConfig");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InvalidConfig);
    }
  }
  CHECK_THROWS_AS(parse_matrix(R"({"trackers": []})"), Error);
}
