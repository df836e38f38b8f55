#include "rovlock/sim/disturbance.hpp"

#include <cmath>

namespace rovlock::sim {

std::string_view mode_name(DisturbanceMode mode) {
  switch (mode) {
    case DisturbanceMode::None: return "none";
    case DisturbanceMode::Bubbles: return "bubbles";
    case DisturbanceMode::Positional: return "positional";
  }
  return "none";
}

std::optional<DisturbanceMode> parse_mode(std::string_view name) {
  if (name == "none") return DisturbanceMode::None;
  if (name == "bubbles") return DisturbanceMode::Bubbles;
  if (name == "positional") return DisturbanceMode::Positional;
  return std::nullopt;
}

void DisturbanceScript::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!std::isfinite(e.amplitude) || !std::isfinite(e.t_start) || !(e.duration > 0.0))
      throw Error(Errc::InvalidConfig, "pulse needs a finite amplitude and positive duration");
    if (i > 0 && e.t_start < events[i - 1].t_start)
      throw Error(Errc::InvalidConfig, "pulses must be time-ordered");
  }
}

AxisArray DisturbanceScript::force(double t, const PlantParams& plant) const {
  constexpr double kEps = 1e-9;
  AxisArray f{};
  for (const auto& e : events) {
    if (t + kEps < e.t_start || t + kEps >= e.t_start + e.duration) continue;
    const int a = static_cast<int>(e.axis);
    f[a] += e.amplitude * plant.drag[a] / e.duration;
  }
  return f;
}

std::optional<double> DisturbanceScript::first_onset() const {
  if (events.empty()) return std::nullopt;
  return events.front().t_start;
}

VisualNoiseParams default_bubbles() {
  VisualNoiseParams n;
  n.bubble_rate = 1.5;
  n.bubble_opacity = 0.45;
  n.occluder_width = 30.0;
  n.occluder_opacity = 0.5;
  n.occluder_period = 8.0;
  n.occluder_amplitude = 60.0;
  n.turbidity = 0.85;
  return n;
}

StandardDisturbance standard_disturbance_script(DisturbanceMode mode) {
  StandardDisturbance out;
  if (mode == DisturbanceMode::Bubbles) out.noise = default_bubbles();
  if (mode != DisturbanceMode::Positional) return out;
  const Axis order[] = {Axis::Yaw, Axis::Z, Axis::X, Axis::Y};
  double t = kFirstPulse;
  for (Axis axis : order) {
    const double amp = axis == Axis::Yaw ? kPulseRadians : kPulseMetres;
    for (double sign : {1.0, -1.0}) {
      out.script.events.push_back({t, axis, sign * amp, 1.0});
      t += kPulseSpacing;
    }
  }
  return out;
}

}  // namespace rovlock::sim
