#pragma once

#include "rovlock/control/locking.hpp"

namespace rovlock::sim {

using control::Axis;
using control::AxisArray;
using control::ControlCommand;

/// World frame: +x sway right, +y heave up, +z surge towards the target.
/// Yaw is positive when the camera turns right.
struct RovState {
  AxisArray position{};  // m, m, m, rad
  AxisArray velocity{};  // m/s, m/s, m/s, rad/s
};

struct PlantParams {
  AxisArray mass{11.0, 11.0, 11.0, 11.0};    // kg (kg m^2 for yaw)
  AxisArray drag{25.0, 25.0, 25.0, 25.0};    // N s/m
  AxisArray thrust{40.0, 40.0, 40.0, 40.0};  // N per unit command
  double dt = 1.0 / 15.0;

  /// Throws InvalidConfig unless everything is positive and dt <= 0.2.
  void validate() const;
};

/// Semi-implicit Euler, axes decoupled.
RovState plant_step(const RovState& state, const ControlCommand& cmd, const AxisArray& ext_force,
                    const PlantParams& params);

/// Thruster signs for this camera geometry: a positive controller output on
/// sway or yaw must move the vehicle the negative way to shrink the deviation.
inline constexpr AxisArray kThrustSigns{-1.0, 1.0, 1.0, -1.0};

ControlCommand to_thrusters(const ControlCommand& cmd);

}  // namespace rovlock::sim
