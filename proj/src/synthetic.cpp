#include "pulsejet/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pulsejet::analysis {
namespace {

constexpr double kPi = std::numbers::pi;

// Mean of sin^m over one half period.
double sine_power_mean(double m) {
  return std::exp(std::lgamma(0.5 * (m + 1.0)) - std::lgamma(0.5 * m + 1.0)) / std::sqrt(kPi);
}

// Exponent whose mixed lobe reaches the requested impulse for the given
// peak. Mixed lobe: w sin(x) + (1 - w) sin(x)^m.
double lobe_exponent(const StrokeShape& shape) {
  const double w = shape.active_linear_weight;
  const double target =
      (shape.active_impulse / (shape.active_peak * shape.active_duration) - w * 2.0 / kPi) / (1.0 - w);
  if (!(target > 0.0) || target > 2.0 / kPi) throw std::invalid_argument("active lobe impulse/peak not reachable");
  double lo = 1.0, hi = 400.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sine_power_mean(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double rebound_envelope(const StrokeShape& shape, double s) {
  const double active = shape.rebound_duration - shape.hold_time;
  if (s <= 0.0 || s >= active) return 0.0;
  double taper = 1.0;
  if (s > active - shape.taper) {
    const double u = (active - s) / shape.taper;
    taper = std::sin(0.5 * kPi * u) * std::sin(0.5 * kPi * u);
  }
  return std::exp(-s / shape.ring_decay) * 0.5 * (1.0 - std::cos(2.0 * kPi * s / shape.ring_period)) * taper;
}

double rebound_scale(const StrokeShape& shape) {
  const double active = shape.rebound_duration - shape.hold_time;
  const int n = 200000;
  const double h = active / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += wgt * rebound_envelope(shape, i * h);
  }
  return shape.rebound_impulse / (sum * h / 3.0);
}

}  // namespace

namespace {

double shape_value(const StrokeShape& shape, double exponent, double ring, double s) {
  const double half = 0.5 * shape.active_duration;
  const double pre_start = -half - shape.pre_duration;
  if (s <= pre_start) return 0.0;
  if (s < -half) {
    const double u = (s - pre_start) / shape.pre_duration;
    if (shape.pre_kind == StrokeShape::PreKind::Dip) {
      const double amp = -shape.pre_impulse / (shape.pre_duration * sine_power_mean(0.5));
      return -amp * std::sqrt(std::max(0.0, std::sin(kPi * u)));
    }
    const double v = std::sin(2.0 * kPi * u);
    return shape.pre_amplitude * std::copysign(std::sqrt(std::abs(v)), v);
  }
  if (s < half) {
    const double x = std::sin(kPi * (s + half) / shape.active_duration);
    const double w = shape.active_linear_weight;
    return shape.active_peak * (w * x + (1.0 - w) * std::pow(std::max(0.0, x), exponent));
  }
  return ring * rebound_envelope(shape, s - half);
}

}  // namespace

double evaluate_shape(const StrokeShape& shape, double s) {
  return shape_value(shape, lobe_exponent(shape), rebound_scale(shape), s);
}

ForceTrace synthetic_trace(const StrokeShape& shape, const SyntheticTrial& trial, double sample_rate,
                           StrokeDirection direction, const std::string& label) {
  const double dt = 1.0 / sample_rate;
  const auto n = static_cast<std::size_t>(std::llround((trial.record_end - trial.record_start) / dt)) + 1;
  std::mt19937_64 rng(trial.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double exponent = lobe_exponent(shape);
  const double ring = rebound_scale(shape);
  std::vector<double> time(n), force(n);
  for (std::size_t i = 0; i < n; ++i) {
    time[i] = trial.record_start + static_cast<double>(i) * dt;
    const double f = shape_value(shape, exponent, ring, time[i] - trial.peak_time);
    force[i] = f + (trial.noise_sigma > 0.0 ? trial.noise_sigma * noise(rng) : 0.0);
  }
  return make_trace(std::move(time), std::move(force), direction, label);
}

StrokeShape downstroke_shape(double peak) {
  StrokeShape s;
  s.pre_kind = StrokeShape::PreKind::Dip;
  s.pre_duration = 0.2;
  s.pre_impulse = -0.03;
  s.active_duration = 0.14;
  s.active_impulse = 0.18;
  s.active_peak = peak;
  s.active_linear_weight = 0.2;
  s.rebound_duration = 0.66;
  s.rebound_impulse = -0.12;
  return s;
}

StrokeShape upstroke_shape(double peak) {
  StrokeShape s;
  s.pre_kind = StrokeShape::PreKind::Wiggle;
  s.pre_duration = 0.2;
  s.pre_amplitude = 0.15;
  s.active_duration = 0.135;
  s.active_impulse = 0.15;
  s.active_peak = peak;
  s.active_linear_weight = 0.3;
  s.rebound_duration = 0.665;
  s.rebound_impulse = -0.13;
  return s;
}

std::vector<ForceTrace> golden_trials(StrokeDirection direction) {
  const bool down = direction == StrokeDirection::Downstroke;
  // Trial peaks average to 4.66 N (max 5.59 N) down and 2.60 N (max 2.80 N) up.
  const double peaks_down[3] = {5.59, 4.20, 4.19};
  const double peaks_up[3] = {2.80, 2.50, 2.50};
  const double peak_times[3] = {1.0, 1.2, 1.1};
  std::vector<ForceTrace> out;
  for (int k = 0; k < 3; ++k) {
    SyntheticTrial trial;
    trial.peak_time = peak_times[k];
    trial.record_start = 0.0;
    trial.record_end = peak_times[k] + 1.4;
    trial.noise_sigma = 0.004;
    trial.seed = (down ? 1000u : 2000u) + static_cast<std::uint64_t>(k);
    const auto shape = down ? downstroke_shape(peaks_down[k]) : upstroke_shape(peaks_up[k]);
    out.push_back(synthetic_trace(shape, trial, 500.0, direction,
                                  std::string(down ? "down" : "up") + "_trial" + std::to_string(k + 1)));
  }
  return out;
}

}  // namespace pulsejet::analysis
