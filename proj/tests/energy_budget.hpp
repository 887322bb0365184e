#pragma once

#include <cmath>

#include "pulsejet/engine.hpp"
#include "pulsejet/params.hpp"
#include "pulsejet/sma.hpp"

// Energy ledger of one snap with frozen coil phase states: the hub starts at
// rest on the bottom stop, the top pair is fully austenitic and the bottom
// pair cold, and the run lasts long enough to settle on the top stop.
struct SnapBudget {
  double sma_work = 0.0;
  double bias_work = 0.0;
  double well_change = 0.0;  // U(end) - U(start)
  double kinetic_change = 0.0;
  double damping_loss = 0.0;
  double stop_loss = 0.0;
  double final_position = 0.0;

  double input() const { return sma_work + bias_work; }
  double accounted() const { return well_change + kinetic_change + damping_loss + stop_loss; }
  double closure() const { return std::abs(input() - accounted()) / std::abs(input()); }
};

inline SnapBudget snap_energy_budget(const pulsejet::ParamSet& p, double dt, double duration) {
  using namespace pulsejet;
  const auto& act = p.actuator;
  const auto& ep = p.engine;
  const double a = ep.half_travel();
  const double m = ep.hub_moving_mass;
  engine::EngineState s = engine::at_rest(HubSide::Bottom, ep);
  sma::SmaState top = sma::cold_state(20.0);
  top.austenite_fraction = 1.0;
  sma::SmaState bottom = sma::cold_state(20.0);

  SnapBudget b;
  const double u0 = engine::well_potential(s.hub_position, ep);
  const double k0 = 0.5 * m * s.hub_velocity * s.hub_velocity;
  const long steps = std::lround(duration / dt);
  for (long i = 0; i < steps; ++i) {
    const double y = s.hub_position;
    const double v = s.hub_velocity;
    const auto ext = engine::coil_extensions(y, act, ep);
    const double f_sma = engine::pair_force(top, ext.top, act) - engine::pair_force(bottom, ext.bottom, act);
    const double force = engine::net_hub_force(s, top, bottom, act, ep);
    auto next = engine::step_hub(s, top, bottom, act, ep, dt);
    // Forces act over the step's actual travel; whatever kinetic energy the
    // stop removes is the difference between the free and clamped velocity.
    const double dy = next.hub_position - y;
    const double v_free = v + force / m * dt;
    b.sma_work += f_sma * dy;
    b.bias_work += ep.barrier_bias_force * dy;
    b.damping_loss += ep.hub_damping * v * dy;
    if (std::abs(y + v_free * dt) > a) {
      b.stop_loss += 0.5 * m * (v_free * v_free - next.hub_velocity * next.hub_velocity);
    }
    s = next;
  }
  b.well_change = engine::well_potential(s.hub_position, ep) - u0;
  b.kinetic_change = 0.5 * m * s.hub_velocity * s.hub_velocity - k0;
  b.final_position = s.hub_position;
  return b;
}
