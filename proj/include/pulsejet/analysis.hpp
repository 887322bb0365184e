#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulsejet::analysis {

enum class StrokeDirection { Upstroke, Downstroke };

std::string to_string(StrokeDirection d);

// Thrust-axis force samples of one trial.
struct ForceTrace {
  std::vector<double> time;   // [s], strictly increasing
  std::vector<double> force;  // [N]
  double sample_rate = 500.0;
  StrokeDirection direction = StrokeDirection::Downstroke;
  std::string label;

  std::size_t size() const { return time.size(); }
};

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NoPeakError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};
class DegenerateTraceError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

struct AnalysisConfig {
  // A contraction peak is the maximum of the first excursion above this
  // fraction of the trace maximum.
  double peak_threshold_fraction = 0.5;
  double noise_window = 0.05;  // quiet lead-in used for the noise estimate [s]
  double noise_sigma_multiplier = 3.0;
  // Lower bound on the noise floor relative to the peak, so a noiseless
  // lead-in does not make every nonzero sample count as activity.
  double relative_noise_floor = 0.005;
  double hold_time = 0.1;  // quiet time that ends the rebound [s]
};

// Builds a trace from samples, checking strict monotonicity and uniform
// sampling within 1 % jitter. The sample rate is estimated from the data.
ForceTrace make_trace(std::vector<double> time, std::vector<double> force, StrokeDirection direction,
                      std::string label = {});

// Two-column CSV (time_s, force_N) with an optional header; a trajectory
// export is also accepted and its thrust_N column is used.
ForceTrace read_force_csv(std::istream& in, StrokeDirection direction, const std::string& label);
ForceTrace read_force_csv_file(const std::string& path, StrokeDirection direction);
void write_force_csv(std::ostream& out, const ForceTrace& trace);

// Index of the first contraction peak.
std::size_t find_first_peak(const std::vector<double>& force, const AnalysisConfig& config,
                            const std::string& label = {});

// Shifts each trial so its first peak sits at t = 0 and crops all of them to
// the common support.
std::vector<ForceTrace> synchronize_trials(const std::vector<ForceTrace>& traces,
                                           const AnalysisConfig& config = {});

struct MeanTrace {
  std::vector<double> time;
  std::vector<double> mean;
  std::vector<double> sigma;  // sample standard deviation across trials
  std::size_t trial_count = 0;
};

// Averages synchronized trials on the first trial's time grid.
MeanTrace average_trials(const std::vector<ForceTrace>& aligned);

struct PhaseBoundaries {
  std::size_t i0 = 0, i1 = 0, i2 = 0, i3 = 0;
  double t0 = 0.0, t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double noise_floor = 0.0;
};

double noise_floor(const std::vector<double>& time, const std::vector<double>& force, double peak,
                   const AnalysisConfig& config);

// A = [t0, t1) pre-thrust, B = [t1, t2) active thrust, C = [t2, t3) rebound.
PhaseBoundaries segment_phases(const std::vector<double>& time, const std::vector<double>& force,
                               const AnalysisConfig& config = {});

// Trapezoid over sample nodes i..j.
double integrate_impulse(const std::vector<double>& time, const std::vector<double>& force, std::size_t i,
                         std::size_t j);

// Trapezoid over [a, b] with linear interpolation at the window ends.
double integrate_impulse(const std::vector<double>& time, const std::vector<double>& force, double a,
                         double b);

struct PhaseMetrics {
  double start = 0.0;
  double end = 0.0;
  double duration = 0.0;
  double net_impulse = 0.0;
};

struct StrokeReport {
  StrokeDirection direction = StrokeDirection::Downstroke;
  PhaseMetrics pre_thrust;
  PhaseMetrics active_thrust;
  PhaseMetrics rebound;
  double total_impulse = 0.0;
  double peak_force = 0.0;  // peak of the mean trace
  double peak_time = 0.0;
  double trial_peak_mean = 0.0;
  double trial_peak_max = 0.0;
  double noise_floor = 0.0;
  std::size_t trial_count = 0;
  std::vector<double> time;
  std::vector<double> mean;
  std::vector<double> band;  // two standard deviations
};

StrokeReport build_report(const std::vector<ForceTrace>& traces, const AnalysisConfig& config = {});

std::string report_json(const StrokeReport& report);
void write_band_csv(std::ostream& out, const StrokeReport& report);

}  // namespace pulsejet::analysis
