#include "rovlock/sim/plant.hpp"

#include <cmath>

namespace rovlock::sim {

void PlantParams::validate() const {
  for (int a = 0; a < 4; ++a)
    if (!(mass[a] > 0.0) || !(drag[a] > 0.0) || !(thrust[a] > 0.0))
      throw Error(Errc::InvalidConfig, "plant mass, drag and thrust gain must be positive");
  if (!(dt > 0.0) || dt > 0.2) throw Error(Errc::InvalidConfig, "plant dt must lie in (0, 0.2]");
}

RovState plant_step(const RovState& state, const ControlCommand& cmd, const AxisArray& ext_force,
                    const PlantParams& params) {
  params.validate();
  const AxisArray u = cmd.as_array();
  RovState next = state;
  for (int a = 0; a < 4; ++a) {
    const double force = params.thrust[a] * u[a] + ext_force[a] - params.drag[a] * state.velocity[a];
    next.velocity[a] = state.velocity[a] + params.dt * force / params.mass[a];
    next.position[a] = state.position[a] + params.dt * next.velocity[a];
  }
  next.position[3] = control::wrap_angle(next.position[3]);
  return next;
}

ControlCommand to_thrusters(const ControlCommand& cmd) {
  AxisArray u = cmd.as_array();
  for (int a = 0; a < 4; ++a) u[a] *= kThrustSigns[a];
  return ControlCommand::from_array(u);
}

}  // namespace rovlock::sim
