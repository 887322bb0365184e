#include "pulsejet/design.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pulsejet/config.hpp"
#include "pulsejet/hydro.hpp"
#include "pulsejet/swim.hpp"

namespace pulsejet::design {

ObjectiveKind parse_objective(const std::string& name) {
  if (name == "max-avg-speed" || name == "MAX_AVG_SPEED") return ObjectiveKind::MaxAvgSpeed;
  if (name == "max-net-impulse-per-stroke" || name == "MAX_NET_IMPULSE_PER_STROKE")
    return ObjectiveKind::MaxNetImpulsePerStroke;
  if (name == "min-energy-per-distance" || name == "MIN_ENERGY_PER_DISTANCE")
    return ObjectiveKind::MinEnergyPerDistance;
  if (name == "max-surrogate-thrust" || name == "MAX_SURROGATE_THRUST") return ObjectiveKind::MaxSurrogateMeanThrust;
  throw std::invalid_argument("unknown objective '" + name + "'");
}

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::MaxAvgSpeed: return "max-avg-speed";
    case ObjectiveKind::MaxNetImpulsePerStroke: return "max-net-impulse-per-stroke";
    case ObjectiveKind::MinEnergyPerDistance: return "min-energy-per-distance";
    case ObjectiveKind::MaxSurrogateMeanThrust: return "max-surrogate-thrust";
  }
  return "unknown";
}

ParamSet apply_design(const ParamSet& base, const opt::DesignVector& design) {
  ParamSet p = base;
  for (const auto& e : design.entries) set_param(p, e.path, e.value);
  if (auto v = validate(p); !v.empty()) throw InvariantError(std::move(v));
  return p;
}

opt::DesignVector make_design(const ParamSet& p, const std::vector<opt::Parameter>& bounds) {
  opt::DesignVector d;
  for (auto b : bounds) {
    b.value = std::clamp(get_param(p, b.path), b.lo, b.hi);
    d.entries.push_back(std::move(b));
  }
  return d;
}

opt::Evaluation evaluate(const opt::DesignVector& design, const Objective& objective) {
  if (!design.in_bounds()) throw std::invalid_argument("design outside its bounds");
  ParamSet p = apply_design(objective.base, design);
  opt::Evaluation ev;
  constexpr double kWorst = std::numeric_limits<double>::infinity();

  if (objective.kind == ObjectiveKind::MaxSurrogateMeanThrust) {
    const double t = hydro::stroke_mean_thrust(p.stroke, p.robot);
    ev.score = -t;
    ev.diagnostics["mean_thrust"] = t;
    ev.diagnostics["net_impulse_per_stroke"] = hydro::stroke_net_impulse(p.stroke, p.robot);
    return ev;
  }

  if (objective.horizon > 0.0) p.scenario.duration = objective.horizon;
  if (p.scenario.duration < 2.0 * p.power.cycle_period) {
    throw std::invalid_argument("objective horizon must cover at least two cycles");
  }
  p.scenario.kind = objective.kind == ObjectiveKind::MaxNetImpulsePerStroke ? ScenarioKind::FixedMount
                                                                           : ScenarioKind::FreeSwim;
  sim::TrajectoryMetrics m;
  try {
    m = sim::summarize(sim::run_scenario(p));
  } catch (const sim::SimulationError&) {
    ev.score = kWorst;
    ev.feasible = false;
    ev.diagnostics["diverged"] = 1.0;
    return ev;
  }
  ev.diagnostics = {{"peak_thrust", m.peak_thrust},
                    {"net_impulse", m.net_impulse},
                    {"net_impulse_per_stroke", m.net_impulse_per_stroke},
                    {"peak_speed", m.peak_speed},
                    {"avg_speed", m.avg_speed},
                    {"net_displacement", m.net_displacement},
                    {"electrical_energy", m.electrical_energy},
                    {"snap_count", static_cast<double>(m.snap_count)}};
  ev.feasible = m.feasible;
  switch (objective.kind) {
    case ObjectiveKind::MaxAvgSpeed: ev.score = -m.avg_speed; break;
    case ObjectiveKind::MaxNetImpulsePerStroke: ev.score = -m.net_impulse_per_stroke; break;
    case ObjectiveKind::MinEnergyPerDistance:
      if (m.net_displacement > 0.0) {
        ev.score = m.electrical_energy / m.net_displacement;
      } else {
        ev.feasible = false;
      }
      break;
    case ObjectiveKind::MaxSurrogateMeanThrust: break;
  }
  if (!ev.feasible) ev.score = kWorst;
  return ev;
}

opt::ObjectiveFn objective_function(const Objective& objective) {
  return [objective](const opt::DesignVector& d) { return evaluate(d, objective); };
}

}  // namespace pulsejet::design
