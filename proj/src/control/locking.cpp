#include "rovlock/control/locking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rovlock::control {

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);  // [-pi, pi]
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

Deviation compute_deviation(const BBox& user, const BBox& current, double psi_u, double psi_k) {
  Deviation d;
  d.dx = (user.x + user.w) / 2.0 - (current.x + current.w) / 2.0;
  d.dy = (user.y + user.h) / 2.0 - (current.y + current.h) / 2.0;
  d.ds = (user.w - current.w) / 2.0 + (user.h - current.h) / 2.0;
  d.dpsi = wrap_angle(psi_k - psi_u);
  return d;
}

void PiGains::validate() const {
  for (int a = 0; a < 4; ++a) {
    if (!std::isfinite(kp[a]) || kp[a] < 0.0 || !std::isfinite(ki[a]) || ki[a] < 0.0)
      throw Error(Errc::InvalidConfig, "PI gains must be finite and non-negative");
  }
}

double PiState::clamp_bound(double ki) {
  return ki > 0.0 ? 2.0 / ki : std::numeric_limits<double>::infinity();
}

ControlCommand pi_step(PiState& state, const Deviation& dev, const PiGains& gains) {
  gains.validate();
  const AxisArray d = dev.as_array();
  AxisArray u{};
  for (int a = 0; a < 4; ++a) {
    const double bound = PiState::clamp_bound(gains.ki[a]);
    state.integral[a] = std::clamp(state.integral[a] + d[a], -bound, bound);
    u[a] = std::clamp(gains.kp[a] * d[a] + gains.ki[a] * state.integral[a], -1.0, 1.0);
  }
  return ControlCommand::from_array(u);
}

LockingController::LockingController(const BBox& user, double psi_u, const PiGains& gains)
    : user_(user), psi_u_(psi_u), gains_(gains) {
  if (!user.valid()) throw Error(Errc::InvalidRoi, "user box must have positive size");
  gains_.validate();
}

ControlCommand LockingController::step(const tracking::TrackResult& result, double psi_k) {
  if (result.lost()) {
    state_ = {};
    last_ = {};
    return {};
  }
  last_ = compute_deviation(user_, result.bbox, psi_u_, psi_k);
  return pi_step(state_, last_, gains_);
}

}  // namespace rovlock::control
