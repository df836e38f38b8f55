#pragma once

#include <filesystem>
#include <string>

#include "rovlock/bench/report.hpp"

namespace rovlock::bench {

// JSON keys follow the ExperimentSpec fields:
//   object, mode, tracker, duration, fps, seed, roi {x, y, w, h},
//   patch_size, gains {kp: [4], ki: [4]}
// and for a matrix additionally objects, modes, trackers (arrays of names)
// and threads. Unknown keys are rejected with InvalidConfig.

ExperimentSpec parse_spec(const std::string& json_text, ExperimentSpec base = {});
MatrixConfig parse_matrix(const std::string& json_text, MatrixConfig base = {});

/// Reads a whole file, throwing IoError if it cannot.
std::string read_text(const std::filesystem::path& path);

}  // namespace rovlock::bench
