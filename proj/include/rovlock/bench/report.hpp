#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rovlock/bench/experiment.hpp"

namespace rovlock::bench {

struct Cell {
  SceneObject object = SceneObject::Structure;
  DisturbanceMode mode = DisturbanceMode::None;
  TrackerKind tracker = TrackerKind::CSRT;
  SummaryStats stats;
  int frames_run = 0;
};

using Experiment = std::pair<SceneObject, DisturbanceMode>;

/// Table row order: no disturbance, bubbles, positional; structure before
/// ladder within each.
std::vector<Experiment> table_experiments();

struct MatrixConfig {
  ExperimentSpec base;  // object, mode and tracker are overwritten per run
  std::vector<SceneObject> objects{SceneObject::Structure, SceneObject::Ladder};
  std::vector<DisturbanceMode> modes{DisturbanceMode::None, DisturbanceMode::Bubbles,
                                     DisturbanceMode::Positional};
  std::vector<TrackerKind> trackers{tracking::kBenchmarkTrackers.begin(),
                                    tracking::kBenchmarkTrackers.end()};
  int threads = 0;  // 0: one per hardware thread
};

struct Report {
  std::vector<Experiment> experiments;
  std::vector<TrackerKind> trackers;
  std::vector<Cell> cells;  // experiment-major, tracker-minor

  const Cell* find(SceneObject object, DisturbanceMode mode, TrackerKind tracker) const;
};

/// Every (object, mode, tracker) run with the base seed. Runs may execute in
/// parallel; the report order does not depend on scheduling.
Report run_matrix(const MatrixConfig& config);

struct TrackerAverage {
  bool failed = false;  // any cell failed: the average renders FAIL
  double position = 0.0;
  double yaw = 0.0;
};

TrackerAverage tracker_average(const Report& report, TrackerKind tracker);

std::string results_csv(const Report& report);
std::string table_markdown(const Report& report);
std::string box_plot_svg(const Report& report, SceneObject object, DisturbanceMode mode);
std::string box_plot_name(SceneObject object, DisturbanceMode mode);

/// results.csv, table.md and one box plot per experiment. Throws IoError.
void emit_report(const Report& report, const std::filesystem::path& dir);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rovlock::bench
