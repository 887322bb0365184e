#pragma once

#include <cstdint>

#include "pulsejet/params.hpp"
#include "pulsejet/sma.hpp"

namespace pulsejet::engine {

enum class Pair { None, Top, Bottom };

// Central hub on the rod. y = +a is the top stop (toward the lid).
struct EngineState {
  double hub_position = 0.0;
  double hub_velocity = 0.0;
  Pair active_pair = Pair::None;
  std::int64_t snap_count = 0;

  bool operator==(const EngineState&) const = default;
};

EngineState at_rest(HubSide side, const EngineParams& params);

// Static equilibrium on the given side with both pairs cold and stretched by
// the hub. The cold coils pull toward the centre and the bias tilts the
// well, so this can sit slightly inside the stop.
EngineState settled_rest(HubSide side, const ActuatorParams& actuator, const EngineParams& params,
                         double water_temperature);

// Depth U0 of the quartic well whose steepest slope on (-a, a) equals the
// barrier peak force: |dU/dy| peaks at y = a/sqrt(3) with value 8 U0/(3 sqrt(3) a).
double well_depth(const EngineParams& params);

// U(y) = U0 ((y/a)^2 - 1)^2. Throws std::out_of_range for |y| > a.
double well_potential(double y, const EngineParams& params);
double well_gradient(double y, const EngineParams& params);

struct CoilExtensions {
  double top = 0.0;
  double bottom = 0.0;
};

// Top coils shorten as the hub rises; bottom coils are the mirror image.
CoilExtensions coil_extensions(double y, const ActuatorParams& actuator, const EngineParams& params);

// Each pair pulls with two coils.
double pair_force(const sma::SmaState& coil, double extension, const ActuatorParams& actuator);

// F = F_top - F_bottom - dU/dy - c v + bias, positive toward the top stop.
double net_hub_force(const EngineState& engine, const sma::SmaState& top, const sma::SmaState& bottom,
                     const ActuatorParams& actuator, const EngineParams& params);

// Semi-implicit Euler step with hard stops at +-a.
EngineState step_hub(const EngineState& engine, const sma::SmaState& top, const sma::SmaState& bottom,
                     const ActuatorParams& actuator, const EngineParams& params, double dt);

// V(y) = V_rest (r(y)/r_rest)^2 with r(y) = r_rest + lambda (a - |y|).
double bell_volume(double y, const EngineParams& params, const RobotParams& robot);

}  // namespace pulsejet::engine
