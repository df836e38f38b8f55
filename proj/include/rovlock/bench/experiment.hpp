#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rovlock/control/locking.hpp"
#include "rovlock/sim/disturbance.hpp"
#include "rovlock/sim/plant.hpp"
#include "rovlock/sim/scene.hpp"
#include "rovlock/tracking/tracker.hpp"

namespace rovlock::bench {

using control::ControlCommand;
using control::Deviation;
using sim::DisturbanceMode;
using sim::RovState;
using sim::SceneObject;
using tracking::TrackerKind;
using tracking::TrackStatus;
using vision::BBox;
using vision::Frame;

/// Lost must persist this long before a recovering tracker (TLD) fails.
inline constexpr double kRecoveryAllowance = 3.0;  // s

struct ExperimentSpec {
  SceneObject object = SceneObject::Structure;
  DisturbanceMode mode = DisturbanceMode::None;
  TrackerKind tracker = TrackerKind::CSRT;
  double duration = 60.0;  // s
  double fps = 15.0;
  std::uint64_t seed = 1;
  std::optional<BBox> roi;  // empty: the true box at t = 0
  tracking::TrackerConfig tracker_config{};
  control::PiGains gains{};
  sim::PlantParams plant{};  // dt is replaced by 1 / fps
  std::optional<sim::DisturbanceScript> script;  // replaces the mode's pulse script

  int frame_count() const;
  /// Throws InvalidSpec when fewer than 100 frames would run or fps is not
  /// positive.
  void validate() const;
};

struct FrameRecord {
  int index = 0;
  double t = 0.0;
  BBox tracked;
  TrackStatus status = TrackStatus::Tracking;
  double confidence = 0.0;
  Deviation deviation;        // controller input, from the tracked box
  Deviation true_deviation;   // same formula on the true box
  ControlCommand command;
  RovState state;             // vehicle state the frame was rendered from
  BBox truth;
  bool target_visible = true;  // false once the target left the image
};

/// Lost status, a box disjoint from the true target, or a target out of view.
bool frame_lost(const FrameRecord& rec);

struct RunLog {
  ExperimentSpec spec;
  BBox roi;
  double psi_u = 0.0;
  std::vector<FrameRecord> frames;
  bool failed = false;
  int fail_frame = -1;
  double stats_from = 0.0;  // s, frames before this are settling

  bool empty() const { return frames.empty(); }
};

/// Called with every frame as the tracker sees it, before the tracker runs.
using FrameSink = std::function<void(int index, const Frame& frame, const RovState& state, const BBox& truth)>;

RunLog run_experiment(const ExperimentSpec& spec, const FrameSink& sink = {});

/// Euclidean norm of (dx, dy).
double position_error(const Deviation& dev);

struct OrderStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Quartiles by linear interpolation between order statistics. Throws
/// EmptyLog on an empty sample.
OrderStats order_stats(std::vector<double> values);

struct SummaryStats {
  OrderStats position;  // px
  OrderStats yaw;       // rad, |dpsi|
  bool failed = false;
  int frames = 0;       // frames that entered the statistics
  int fail_frame = -1;
};

/// Errors come from the true box against the user box. Settling frames and
/// everything from the failure on are left out.
SummaryStats summarize(const RunLog& log);

/// Tracker id a spec seed turns into; trackers, noise and scene share it.
tracking::TrackerConfig seeded_config(const ExperimentSpec& spec);

/// Decides whether a run has failed. A frame counts as lost when the tracker
/// says Lost or when its box no longer touches the true target (the vehicle
/// is then locking onto something else). Ordinary trackers fail on the first
/// lost frame, TLD only when loss outlasts the recovery allowance.
class FailureMonitor {
 public:
  FailureMonitor(TrackerKind kind, double fps);
  /// Returns true once the run has failed; fail_frame() is then valid.
  bool observe(int index, bool lost);
  int fail_frame() const { return fail_frame_; }

 private:
  bool recovers_;
  int allowance_;
  int streak_start_ = -1;
  int fail_frame_ = -1;
};

}  // namespace rovlock::bench
