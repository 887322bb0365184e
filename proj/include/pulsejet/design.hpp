#pragma once

#include <string>

#include "pulsejet/optimizer.hpp"
#include "pulsejet/params.hpp"

namespace pulsejet::design {

enum class ObjectiveKind {
  MaxAvgSpeed,
  MaxNetImpulsePerStroke,
  MinEnergyPerDistance,
  // Closed-form constant-rate stroke thrust; no simulation.
  MaxSurrogateMeanThrust,
};

ObjectiveKind parse_objective(const std::string& name);
std::string to_string(ObjectiveKind kind);

struct Objective {
  ObjectiveKind kind = ObjectiveKind::MaxAvgSpeed;
  ParamSet base;          // scenario template
  double horizon = 0.0;   // simulated time; 0 keeps base.scenario.duration
};

// Copy of `base` with every design entry written to its config path.
// Throws ConfigError for unknown paths and InvariantError when the merged
// set fails validation.
ParamSet apply_design(const ParamSet& base, const opt::DesignVector& design);

// Builds a bounded design vector whose starting values are read from `p`.
opt::DesignVector make_design(const ParamSet& p, const std::vector<opt::Parameter>& bounds);

// Score under the minimization convention (maximized quantities are negated).
// Runs without a snap on every powered cycle are infeasible and score +inf.
opt::Evaluation evaluate(const opt::DesignVector& design, const Objective& objective);

opt::ObjectiveFn objective_function(const Objective& objective);

}  // namespace pulsejet::design
