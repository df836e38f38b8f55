#pragma once

#include <string_view>
#include <optional>
#include <vector>

#include "rovlock/sim/plant.hpp"
#include "rovlock/sim/scene.hpp"

namespace rovlock::sim {

enum class DisturbanceMode { None, Bubbles, Positional };

std::string_view mode_name(DisturbanceMode mode);  // "none", "bubbles", "positional"
std::optional<DisturbanceMode> parse_mode(std::string_view name);

/// A force pulse sized so the free plant ends up displaced by `amplitude`
/// (m or rad): force = amplitude * drag / duration.
struct PulseEvent {
  double t_start = 0.0;  // s
  Axis axis = Axis::X;
  double amplitude = 0.0;
  double duration = 1.0;  // s
};

struct DisturbanceScript {
  std::vector<PulseEvent> events;

  /// Throws InvalidConfig unless events are time-ordered with finite
  /// amplitudes and positive durations.
  void validate() const;
  /// External force per axis at time t.
  AxisArray force(double t, const PlantParams& plant) const;
  std::optional<double> first_onset() const;
};

struct StandardDisturbance {
  DisturbanceScript script;
  std::optional<VisualNoiseParams> noise;
};

inline constexpr double kPulseSpacing = 6.0;  // s
inline constexpr double kFirstPulse = 2.0;    // s
inline constexpr double kPulseMetres = 0.30;
inline constexpr double kPulseRadians = 0.5236;  // 30 degrees

/// Positional mode: yaw +/-, surge +/-, sway +/-, heave +/-, one every 6 s
/// from t = 2 s.
StandardDisturbance standard_disturbance_script(DisturbanceMode mode);

/// The default bubble and pole overlay.
VisualNoiseParams default_bubbles();

}  // namespace rovlock::sim
