#include "pulsejet/hydro.hpp"

#include <cmath>

namespace pulsejet::hydro {

double jet_thrust_instantaneous(double volume_rate, const RobotParams& robot) {
  const double flux = robot.water_density / robot.jet_orifice_area * volume_rate * volume_rate;
  if (volume_rate < 0.0) return flux;
  if (volume_rate > 0.0) return -robot.intake_thrust_factor * flux;
  return 0.0;
}

double stroke_mean_thrust(const StrokeProfile& profile, const RobotParams& robot) {
  const double q = profile.delta_volume / profile.contraction_duration;
  return robot.water_density / robot.jet_orifice_area * q * q;
}

double stroke_net_impulse(const StrokeProfile& profile, const RobotParams& robot) {
  const double dv = profile.delta_volume;
  return robot.water_density / robot.jet_orifice_area * dv * dv *
         (1.0 / profile.contraction_duration - robot.intake_thrust_factor / profile.expansion_duration);
}

double drag_force(double velocity, const RobotParams& robot) {
  return 0.5 * robot.water_density * robot.drag_coefficient * robot.frontal_area * velocity *
         std::abs(velocity);
}

HydroForces forces(double volume_rate, double velocity, const RobotParams& robot) {
  HydroForces f;
  f.thrust = jet_thrust_instantaneous(volume_rate, robot);
  f.drag = drag_force(velocity, robot);
  f.net = f.thrust - f.drag;
  return f;
}

double effective_mass(const RobotParams& robot) {
  return (1.0 + robot.added_mass_coefficient) * robot.total_mass;
}

}  // namespace pulsejet::hydro
