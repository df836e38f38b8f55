#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "rovlock/bench/experiment.hpp"

namespace rovlock::bench {

/// 8-bit PNG, grey or RGB. Values are rounded to the nearest 1/255 step, so
/// frames produced by the simulator survive the round trip exactly.
void write_png(const std::filesystem::path& path, const Frame& frame);
/// Throws IoError when the file cannot be opened, MalformedDataset when it is
/// not a PNG this code can decode.
Frame read_png(const std::filesystem::path& path);

struct TelemetryRow {
  int frame = 0;
  double timestamp = 0.0;  // s
  double yaw = 0.0;        // rad
};

struct Dataset {
  std::vector<std::filesystem::path> frames;
  std::vector<TelemetryRow> telemetry;
  BBox roi;
  std::optional<std::vector<BBox>> ground_truth;
};

/// Runs the experiment and writes 000000.png..., telemetry.csv, roi.csv and
/// ground_truth.csv into `dir`.
RunLog export_run(const ExperimentSpec& spec, const std::filesystem::path& dir);

/// Throws MalformedDataset when a file is missing or inconsistent.
Dataset load_dataset(const std::filesystem::path& dir);

struct ReplayResult {
  std::vector<tracking::TrackResult> results;  // one per frame, frame 0 is the roi
  std::vector<Deviation> deviations;
  SummaryStats stats;
};

/// Open-loop tracking over a recorded sequence. Deviations are taken from the
/// tracked box against the recorded roi and yaw telemetry. A frame counts as
/// lost on Lost status, or, when ground truth was recorded, on a box that no
/// longer touches it.
ReplayResult replay_dataset(const Dataset& data, TrackerKind kind, const tracking::TrackerConfig& config,
                            double fps);

}  // namespace rovlock::bench
