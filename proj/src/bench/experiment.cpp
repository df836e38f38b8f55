#include "rovlock/bench/experiment.hpp"

#include <algorithm>
#include <cmath>

namespace rovlock::bench {

int ExperimentSpec::frame_count() const {
  return static_cast<int>(std::floor(duration * fps + 1e-9));
}

void ExperimentSpec::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw Error(Errc::InvalidSpec, "fps must be positive");
  if (!(duration > 0.0) || frame_count() < 100)
    throw Error(Errc::InvalidSpec, "an experiment needs at least 100 frames");
  if (1.0 / fps > 0.2) throw Error(Errc::InvalidSpec, "fps below 5 is too coarse for the plant");
  if (roi && !roi->valid()) throw Error(Errc::InvalidSpec, "roi must have positive size");
}

tracking::TrackerConfig seeded_config(const ExperimentSpec& spec) {
  tracking::TrackerConfig config = spec.tracker_config;
  config.seed = spec.seed;
  return config;
}

FailureMonitor::FailureMonitor(TrackerKind kind, double fps)
    : recovers_(kind == TrackerKind::TLD),
      allowance_(static_cast<int>(std::floor(kRecoveryAllowance * fps + 1e-9))) {}

bool frame_lost(const FrameRecord& rec) {
  return rec.status == TrackStatus::Lost || !rec.target_visible ||
         vision::intersection_area(rec.tracked, rec.truth) <= 0.0;
}

bool FailureMonitor::observe(int index, bool lost) {
  if (fail_frame_ >= 0) return true;
  if (!lost) {
    streak_start_ = -1;
    return false;
  }
  if (streak_start_ < 0) streak_start_ = index;
  if (!recovers_ || index - streak_start_ + 1 > allowance_) fail_frame_ = streak_start_;
  return fail_frame_ >= 0;
}

RunLog run_experiment(const ExperimentSpec& spec, const FrameSink& sink) {
  spec.validate();
  sim::PlantParams plant = spec.plant;
  plant.dt = 1.0 / spec.fps;
  plant.validate();

  const sim::Scene scene = sim::make_scene(spec.object, spec.seed);
  sim::StandardDisturbance dist = sim::standard_disturbance_script(spec.mode);
  if (spec.script) {
    spec.script->validate();
    dist.script = *spec.script;
  }
  std::optional<sim::VisualNoiseParams> noise = dist.noise;
  if (noise) noise->fps = spec.fps;

  RunLog log;
  log.spec = spec;
  log.stats_from = spec.mode == DisturbanceMode::Positional
                       ? std::max(dist.script.first_onset().value_or(0.0), 1.0 / spec.fps)
                       : 1.0 / spec.fps;
  const int n = spec.frame_count();
  log.frames.reserve(n);

  RovState state{};
  auto tracker = tracking::create_tracker(spec.tracker, seeded_config(spec));
  std::optional<control::LockingController> controller;
  FailureMonitor monitor(spec.tracker, spec.fps);

  for (int k = 0; k < n; ++k) {
    const double t = k / spec.fps;
    sim::Rendered r;
    try {
      r = sim::render_frame(scene, state, noise ? &*noise : nullptr, spec.seed, t);
    } catch (const Error& e) {
      if (e.code() != Errc::TargetNotVisible || k == 0) throw;
      log.failed = true;  // the vehicle has turned or driven past the target
      log.fail_frame = monitor.observe(k, true) ? monitor.fail_frame() : k;
      break;
    }
    if (sink) sink(k, r.frame, state, r.truth);

    FrameRecord rec;
    rec.index = k;
    rec.t = t;
    rec.state = state;
    rec.truth = r.truth;
    tracking::TrackResult result;
    if (k == 0) {
      log.roi = spec.roi.value_or(r.truth);
      log.psi_u = state.position[3];
      tracker->init(r.frame, log.roi);
      controller.emplace(log.roi, log.psi_u, spec.gains);
      result = {log.roi, 1.0, TrackStatus::Tracking};
    } else {
      tracker->supply_ground_truth(r.truth);
      result = tracker->update(r.frame);
    }
    rec.tracked = result.bbox;
    rec.status = result.status;
    rec.confidence = result.confidence;
    rec.command = controller->step(result, state.position[3]);
    rec.deviation = controller->last_deviation();
    rec.true_deviation = control::compute_deviation(log.roi, r.truth, log.psi_u, state.position[3]);
    rec.target_visible = r.truth.x < r.frame.width() && r.truth.y < r.frame.height() &&
                         r.truth.x + r.truth.w > 0.0 && r.truth.y + r.truth.h > 0.0;
    log.frames.push_back(rec);

    if (monitor.observe(k, frame_lost(rec))) {
      log.failed = true;
      log.fail_frame = monitor.fail_frame();
      break;
    }
    state = sim::plant_step(state, sim::to_thrusters(rec.command), dist.script.force(t, plant), plant);
  }
  return log;
}

double position_error(const Deviation& dev) { return std::hypot(dev.dx, dev.dy); }

OrderStats order_stats(std::vector<double> v) {
  if (v.empty()) throw Error(Errc::EmptyLog, "no samples to summarise");
  std::sort(v.begin(), v.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {quantile(0.5), quantile(0.25), quantile(0.75), v.front(), v.back()};
}

SummaryStats summarize(const RunLog& log) {
  if (log.frames.empty()) throw Error(Errc::EmptyLog, "run log has no frames");
  std::vector<double> pos, yaw;
  for (const auto& f : log.frames) {
    if (log.failed && f.index >= log.fail_frame) break;
    if (f.t + 1e-9 < log.stats_from) continue;
    pos.push_back(position_error(f.true_deviation));
    yaw.push_back(std::abs(f.true_deviation.dpsi));
  }
  SummaryStats s;
  s.failed = log.failed;
  s.fail_frame = log.fail_frame;
  s.frames = static_cast<int>(pos.size());
  if (pos.empty()) {
    // A run that fails before its statistics window still reports the
    // frames it has, so the stats stay defined.
    for (const auto& f : log.frames) {
      pos.push_back(position_error(f.true_deviation));
      yaw.push_back(std::abs(f.true_deviation.dpsi));
    }
  }
  s.position = order_stats(pos);
  s.yaw = order_stats(yaw);
  return s;
}

}  // namespace rovlock::bench
