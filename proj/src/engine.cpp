#include "pulsejet/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pulsejet::engine {

EngineState at_rest(HubSide side, const EngineParams& params) {
  EngineState s;
  s.hub_position = side == HubSide::Top ? params.half_travel() : -params.half_travel();
  return s;
}

EngineState settled_rest(HubSide side, const ActuatorParams& actuator, const EngineParams& params,
                         double water_temperature) {
  EngineState s = at_rest(side, params);
  const double a = params.half_travel();
  const double sign = side == HubSide::Top ? 1.0 : -1.0;
  // Static force pointing into the stop, as a function of |y|.
  auto inward = [&](double u) {
    EngineState probe;
    probe.hub_position = sign * u;
    const auto ext = coil_extensions(probe.hub_position, actuator, params);
    const auto top = sma::cold_state(water_temperature, ext.top);
    const auto bottom = sma::cold_state(water_temperature, ext.bottom);
    return sign * net_hub_force(probe, top, bottom, actuator, params);
  };
  if (inward(a) >= 0.0) return s;
  constexpr int kScan = 1000;
  double hi = a;
  double lo = -1.0;
  for (int k = 1; k < kScan; ++k) {
    const double u = a * (1.0 - static_cast<double>(k) / kScan);
    if (inward(u) > 0.0) {
      lo = u;
      break;
    }
    hi = u;
  }
  if (lo < 0.0) return s;  // no stable point on this side; the hub will leave it
  for (int it = 0; it < 200 && hi - lo > 1e-15 * a; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inward(mid) > 0.0 ? lo : hi) = mid;
  }
  s.hub_position = sign * 0.5 * (lo + hi);
  return s;
}

double well_depth(const EngineParams& params) {
  return params.barrier_peak_force * 3.0 * std::sqrt(3.0) * params.half_travel() / 8.0;
}

double well_potential(double y, const EngineParams& params) {
  const double a = params.half_travel();
  if (!(std::abs(y) <= a)) {
    throw std::out_of_range("hub position " + std::to_string(y) + " m outside stops +-" + std::to_string(a));
  }
  const double s = (y / a) * (y / a) - 1.0;
  return well_depth(params) * s * s;
}

double well_gradient(double y, const EngineParams& params) {
  const double a = params.half_travel();
  const double q = y / a;
  return 4.0 * well_depth(params) * q * (q * q - 1.0) / a;
}

CoilExtensions coil_extensions(double y, const ActuatorParams& actuator, const EngineParams& params) {
  const double a = params.half_travel();
  return {actuator.pre_stretch + (a - y), actuator.pre_stretch + (a + y)};
}

double pair_force(const sma::SmaState& coil, double extension, const ActuatorParams& actuator) {
  sma::SmaState stretched = coil;
  stretched.displacement = extension;
  return 2.0 * sma::spring_force(stretched, actuator);
}

double net_hub_force(const EngineState& engine, const sma::SmaState& top, const sma::SmaState& bottom,
                     const ActuatorParams& actuator, const EngineParams& params) {
  const double y = engine.hub_position;
  const auto ext = coil_extensions(y, actuator, params);
  const double sma_net = pair_force(top, ext.top, actuator) - pair_force(bottom, ext.bottom, actuator);
  return sma_net - well_gradient(y, params) - params.hub_damping * engine.hub_velocity +
         params.barrier_bias_force;
}

EngineState step_hub(const EngineState& engine, const sma::SmaState& top, const sma::SmaState& bottom,
                     const ActuatorParams& actuator, const EngineParams& params, double dt) {
  const double a = params.half_travel();
  const double m = params.hub_moving_mass;
  const double force = net_hub_force(engine, top, bottom, actuator, params);

  EngineState next = engine;
  double v = engine.hub_velocity + force / m * dt;
  double y = engine.hub_position + v * dt;
  // Stop contact: reflect with restitution, and settle when the bounce is no
  // larger than what one step of the current force would produce.
  const double settle = std::abs(force) / m * dt;
  if (y > a) {
    y = a;
    if (v > 0.0) v = -params.stop_restitution * v;
    if (std::abs(v) <= settle) v = 0.0;
  } else if (y < -a) {
    y = -a;
    if (v < 0.0) v = -params.stop_restitution * v;
    if (std::abs(v) <= settle) v = 0.0;
  }
  const double y0 = engine.hub_position;
  if ((y0 < 0.0 && y >= 0.0) || (y0 > 0.0 && y <= 0.0)) ++next.snap_count;
  next.hub_position = y;
  next.hub_velocity = v;
  return next;
}

double bell_volume(double y, const EngineParams& params, const RobotParams& robot) {
  const double r_rest = robot.bell_radius_rest();
  const double r = r_rest + robot.linkage_ratio * (params.half_travel() - std::abs(y));
  const double k = r / r_rest;
  return robot.bell_volume_rest * k * k;
}

}  // namespace pulsejet::engine
