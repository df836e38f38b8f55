#pragma once

#include <array>

#include "rovlock/tracking/tracker.hpp"

namespace rovlock::control {

using vision::BBox;

/// Axis order used by every per-axis array below: sway, heave, surge, yaw.
enum class Axis { X = 0, Y = 1, Z = 2, Yaw = 3 };
using AxisArray = std::array<double, 4>;

struct Deviation {
  double dx = 0.0;    // px
  double dy = 0.0;    // px
  double ds = 0.0;    // px
  double dpsi = 0.0;  // rad, in (-pi, pi]

  AxisArray as_array() const { return {dx, dy, ds, dpsi}; }
};

/// Wraps to (-pi, pi].
double wrap_angle(double a);

/// The box terms use (x + w) / 2 rather than the centre x + w / 2.
Deviation compute_deviation(const BBox& user, const BBox& current, double psi_u, double psi_k);

struct PiGains {
  AxisArray kp{0.004, 0.004, 0.006, 0.8};
  AxisArray ki{0.004 / 500, 0.004 / 500, 0.006 / 500, 0.8 / 500};  // per frame

  /// Throws InvalidConfig on a negative or non-finite gain.
  void validate() const;
};

struct PiState {
  AxisArray integral{};

  /// 2 / ki, or infinity when ki is zero.
  static double clamp_bound(double ki);
};

struct ControlCommand {
  double u_x = 0.0;
  double u_y = 0.0;
  double u_z = 0.0;
  double u_psi = 0.0;

  AxisArray as_array() const { return {u_x, u_y, u_z, u_psi}; }
  static ControlCommand from_array(const AxisArray& a) { return {a[0], a[1], a[2], a[3]}; }
};

ControlCommand pi_step(PiState& state, const Deviation& dev, const PiGains& gains);

/// Tracker result plus yaw reading in, thrust command out. A Lost result
/// gives the zero command and clears the integrators.
class LockingController {
 public:
  LockingController(const BBox& user, double psi_u, const PiGains& gains = {});

  ControlCommand step(const tracking::TrackResult& result, double psi_k);
  const Deviation& last_deviation() const { return last_; }
  const PiState& state() const { return state_; }
  void reset() { state_ = {}; }

 private:
  BBox user_;
  double psi_u_;
  PiGains gains_;
  PiState state_;
  Deviation last_;
};

}  // namespace rovlock::control
