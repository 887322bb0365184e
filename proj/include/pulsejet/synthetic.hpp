#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsejet/analysis.hpp"

namespace pulsejet::analysis {

// Piecewise-analytic stroke shaped like a load-cell recording: a pre-thrust
// lobe, a sharp active-thrust lobe, and a decaying rebound. Times are
// relative to the active-thrust peak.
struct StrokeShape {
  enum class PreKind { Dip, Wiggle };

  PreKind pre_kind = PreKind::Dip;
  double pre_duration = 0.2;
  double pre_impulse = -0.03;   // Dip only; a wiggle integrates to zero
  double pre_amplitude = 0.15;  // Wiggle only
  double active_duration = 0.14;
  double active_impulse = 0.18;
  double active_peak = 4.66;
  double active_linear_weight = 0.2;  // share of the half-sine onset term
  double rebound_duration = 0.66;     // includes the quiet hold that ends it
  double rebound_impulse = -0.12;
  double hold_time = 0.1;
  double ring_period = 0.1;
  double ring_decay = 0.25;
  double taper = 0.01;
};

struct SyntheticTrial {
  double peak_time = 1.0;
  double record_start = 0.0;
  double record_end = 2.5;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

double evaluate_shape(const StrokeShape& shape, double s);

ForceTrace synthetic_trace(const StrokeShape& shape, const SyntheticTrial& trial, double sample_rate,
                           StrokeDirection direction, const std::string& label);

StrokeShape downstroke_shape(double peak);
StrokeShape upstroke_shape(double peak);

// Three-trial sets matching the shipped golden traces.
std::vector<ForceTrace> golden_trials(StrokeDirection direction);

}  // namespace pulsejet::analysis
