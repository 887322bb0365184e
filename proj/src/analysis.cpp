#include "pulsejet/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pulsejet/trace_io.hpp"

namespace pulsejet::analysis {

std::string to_string(StrokeDirection d) {
  return d == StrokeDirection::Upstroke ? "upstroke" : "downstroke";
}

ForceTrace make_trace(std::vector<double> time, std::vector<double> force, StrokeDirection direction,
                      std::string label) {
  if (time.size() != force.size()) throw AnalysisError(label + ": time and force lengths differ");
  if (time.size() < 2) throw AnalysisError(label + ": trace needs at least two samples");
  const double mean_dt = (time.back() - time.front()) / static_cast<double>(time.size() - 1);
  for (std::size_t i = 1; i < time.size(); ++i) {
    const double dt = time[i] - time[i - 1];
    if (!(dt > 0.0)) throw AnalysisError(label + ": sample times must be strictly increasing");
    if (std::abs(dt - mean_dt) > 0.01 * mean_dt) {
      throw AnalysisError(label + ": non-uniform sampling at sample " + std::to_string(i));
    }
  }
  ForceTrace t;
  t.time = std::move(time);
  t.force = std::move(force);
  t.sample_rate = 1.0 / mean_dt;
  t.direction = direction;
  t.label = std::move(label);
  return t;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

ForceTrace read_force_csv(std::istream& in, StrokeDirection direction, const std::string& label) {
  std::string line;
  std::vector<double> time, force;
  std::size_t time_col = 0, force_col = 1;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    double t = 0.0, f = 0.0;
    if (first) {
      first = false;
      if (cells.empty() || !parse_double(cells[0], t)) {
        // Header row. Trajectory exports carry the thrust in a named column.
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (cells[c] == "time_s") time_col = c;
          if (cells[c] == "thrust_N" || cells[c] == "force_N") force_col = c;
        }
        continue;
      }
    }
    const auto need = std::max(time_col, force_col) + 1;
    if (cells.size() < need || !parse_double(cells[time_col], t) || !parse_double(cells[force_col], f)) {
      throw AnalysisError(label + ": line " + std::to_string(line_no) + ": cannot parse row");
    }
    time.push_back(t);
    force.push_back(f);
  }
  if (time.empty()) throw AnalysisError(label + ": empty trace");
  return make_trace(std::move(time), std::move(force), direction, label);
}

ForceTrace read_force_csv_file(const std::string& path, StrokeDirection direction) {
  std::ifstream in(path);
  if (!in) throw AnalysisError(path + ": cannot open file");
  return read_force_csv(in, direction, path);
}

void write_force_csv(std::ostream& out, const ForceTrace& trace) {
  out << "time_s,force_N\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << io::sig9(trace.time[i]) << ',' << io::sig9(trace.force[i]) << '\n';
  }
}

std::size_t find_first_peak(const std::vector<double>& force, const AnalysisConfig& config,
                            const std::string& label) {
  if (force.empty()) throw NoPeakError("no peak found in trial '" + label + "': empty trace");
  const double max = *std::max_element(force.begin(), force.end());
  if (!(max > 0.0)) throw NoPeakError("no peak found in trial '" + label + "'");
  const double threshold = config.peak_threshold_fraction * max;
  std::size_t i = 0;
  while (force[i] < threshold) ++i;
  std::size_t best = i;
  for (std::size_t j = i; j < force.size() && force[j] >= threshold; ++j) {
    if (force[j] > force[best]) best = j;
  }
  return best;
}

std::vector<ForceTrace> synchronize_trials(const std::vector<ForceTrace>& traces, const AnalysisConfig& config) {
  if (traces.empty()) throw AnalysisError("no trials to synchronize");
  std::vector<ForceTrace> aligned;
  aligned.reserve(traces.size());
  double lo = -INFINITY, hi = INFINITY;
  for (const auto& tr : traces) {
    const auto p = find_first_peak(tr.force, config, tr.label);
    ForceTrace s = tr;
    const double shift = tr.time[p];
    for (auto& t : s.time) t -= shift;
    lo = std::max(lo, s.time.front());
    hi = std::min(hi, s.time.back());
    aligned.push_back(std::move(s));
  }
  for (auto& s : aligned) {
    const double eps = 1e-6 / s.sample_rate;
    ForceTrace c = s;
    c.time.clear();
    c.force.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.time[i] >= lo - eps && s.time[i] <= hi + eps) {
        c.time.push_back(s.time[i]);
        c.force.push_back(s.force[i]);
      }
    }
    if (c.size() < 2) throw AnalysisError("trials '" + s.label + "' share no common support");
    s = std::move(c);
  }
  return aligned;
}

namespace {

double interpolate(const std::vector<double>& t, const std::vector<double>& f, double x) {
  if (x <= t.front()) return f.front();
  if (x >= t.back()) return f.back();
  auto it = std::upper_bound(t.begin(), t.end(), x);
  const auto k = static_cast<std::size_t>(it - t.begin()) - 1;
  const double w = (x - t[k]) / (t[k + 1] - t[k]);
  return f[k] + w * (f[k + 1] - f[k]);
}

}  // namespace

MeanTrace average_trials(const std::vector<ForceTrace>& aligned) {
  if (aligned.empty()) throw AnalysisError("no trials to average");
  const auto& grid = aligned.front().time;
  const auto n = static_cast<Eigen::Index>(aligned.size());
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd samples(n, m);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& tr = aligned[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < m; ++i) {
      samples(k, i) = k == 0 ? tr.force[static_cast<std::size_t>(i)]
                             : interpolate(tr.time, tr.force, grid[static_cast<std::size_t>(i)]);
    }
  }
  // Running mean stays exact when every trial carries the same value.
  Eigen::RowVectorXd mean = samples.row(0);
  for (Eigen::Index k = 1; k < n; ++k) mean += (samples.row(k) - mean) / static_cast<double>(k + 1);
  Eigen::RowVectorXd sigma = Eigen::RowVectorXd::Zero(m);
  if (n > 1) {
    sigma = ((samples.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n - 1)).sqrt();
  }
  MeanTrace out;
  out.time = grid;
  out.mean.assign(mean.data(), mean.data() + m);
  out.sigma.assign(sigma.data(), sigma.data() + m);
  out.trial_count = aligned.size();
  return out;
}

double noise_floor(const std::vector<double>& time, const std::vector<double>& force, double peak,
                   const AnalysisConfig& config) {
  std::size_t n = 0;
  while (n < time.size() && time[n] < time.front() + config.noise_window) ++n;
  n = std::max<std::size_t>(n, 2);
  n = std::min(n, time.size());
  Eigen::Map<const Eigen::ArrayXd> lead(force.data(), static_cast<Eigen::Index>(n));
  const double sd = std::sqrt((lead - lead.mean()).square().mean());
  return std::max(config.noise_sigma_multiplier * sd, config.relative_noise_floor * std::abs(peak));
}

PhaseBoundaries segment_phases(const std::vector<double>& time, const std::vector<double>& force,
                               const AnalysisConfig& config) {
  if (time.size() != force.size() || time.size() < 3) throw DegenerateTraceError("trace too short to segment");
  std::size_t p = 0;
  try {
    p = find_first_peak(force, config);
  } catch (const NoPeakError&) {
    throw DegenerateTraceError("degenerate trace: no contraction peak");
  }
  const std::size_t n = force.size();
  PhaseBoundaries b;
  b.noise_floor = noise_floor(time, force, force[p], config);

  bool found = false;
  for (std::size_t j = p; j >= 1; --j) {
    if (force[j - 1] <= 0.0 && force[j] > 0.0) {
      b.i1 = std::abs(force[j - 1]) <= std::abs(force[j]) ? j - 1 : j;
      found = true;
      break;
    }
  }
  if (!found || b.i1 == 0) throw DegenerateTraceError("degenerate trace: no upward zero-crossing before the peak");

  found = false;
  for (std::size_t j = p + 1; j < n; ++j) {
    if (force[j - 1] > 0.0 && force[j] <= 0.0) {
      b.i2 = std::abs(force[j - 1]) < std::abs(force[j]) ? j - 1 : j;
      found = true;
      break;
    }
  }
  if (!found) throw DegenerateTraceError("degenerate trace: no downward zero-crossing after the peak");

  b.i0 = 0;
  for (std::size_t i = 0; i < b.i1; ++i) {
    if (std::abs(force[i]) > b.noise_floor) {
      b.i0 = i;
      break;
    }
  }

  b.i3 = n - 1;
  const double slack = 1e-9 * (time[1] - time[0]);
  std::size_t run_start = b.i2;
  for (std::size_t k = b.i2; k < n; ++k) {
    if (std::abs(force[k]) > b.noise_floor) {
      run_start = k + 1;
    } else if (time[k] - time[run_start] >= config.hold_time - slack) {
      b.i3 = k;
      break;
    }
  }
  if (b.i3 <= b.i2) throw DegenerateTraceError("degenerate trace: no rebound window");

  b.t0 = time[b.i0];
  b.t1 = time[b.i1];
  b.t2 = time[b.i2];
  b.t3 = time[b.i3];
  return b;
}

double integrate_impulse(const std::vector<double>& time, const std::vector<double>& force, std::size_t i,
                         std::size_t j) {
  if (j <= i || j >= time.size()) throw AnalysisError("empty or out-of-range impulse window");
  double sum = 0.0;
  for (std::size_t k = i + 1; k <= j; ++k) sum += 0.5 * (force[k] + force[k - 1]) * (time[k] - time[k - 1]);
  return sum;
}

double integrate_impulse(const std::vector<double>& time, const std::vector<double>& force, double a,
                         double b) {
  if (!(b > a)) throw AnalysisError("empty impulse window");
  if (time.size() < 2 || a < time.front() || b > time.back()) {
    throw AnalysisError("impulse window outside trace support");
  }
  // Piecewise-linear integral; nodes strictly inside (a, b) plus the two
  // interpolated end points.
  std::vector<double> t{a};
  std::vector<double> f{interpolate(time, force, a)};
  for (std::size_t k = 0; k < time.size(); ++k) {
    if (time[k] > a && time[k] < b) {
      t.push_back(time[k]);
      f.push_back(force[k]);
    }
  }
  t.push_back(b);
  f.push_back(interpolate(time, force, b));
  double sum = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) sum += 0.5 * (f[k] + f[k - 1]) * (t[k] - t[k - 1]);
  return sum;
}

StrokeReport build_report(const std::vector<ForceTrace>& traces, const AnalysisConfig& config) {
  auto aligned = synchronize_trials(traces, config);
  auto mean = average_trials(aligned);
  const auto b = segment_phases(mean.time, mean.mean, config);

  StrokeReport r;
  r.direction = traces.front().direction;
  r.trial_count = mean.trial_count;
  r.noise_floor = b.noise_floor;
  auto phase = [&](std::size_t i, std::size_t j) {
    PhaseMetrics m;
    m.start = mean.time[i];
    m.end = mean.time[j];
    m.duration = m.end - m.start;
    m.net_impulse = integrate_impulse(mean.time, mean.mean, i, j);
    return m;
  };
  r.pre_thrust = phase(b.i0, b.i1);
  r.active_thrust = phase(b.i1, b.i2);
  r.rebound = phase(b.i2, b.i3);
  r.total_impulse = r.pre_thrust.net_impulse + r.active_thrust.net_impulse + r.rebound.net_impulse;

  const auto p = find_first_peak(mean.mean, config);
  r.peak_force = mean.mean[p];
  r.peak_time = mean.time[p];
  double sum = 0.0;
  r.trial_peak_max = -INFINITY;
  for (const auto& tr : aligned) {
    const double v = tr.force[find_first_peak(tr.force, config, tr.label)];
    sum += v;
    r.trial_peak_max = std::max(r.trial_peak_max, v);
  }
  r.trial_peak_mean = sum / static_cast<double>(aligned.size());
  r.time = mean.time;
  r.mean = mean.mean;
  r.band.resize(mean.sigma.size());
  std::transform(mean.sigma.begin(), mean.sigma.end(), r.band.begin(), [](double s) { return 2.0 * s; });
  return r;
}

std::string report_json(const StrokeReport& r) {
  nlohmann::ordered_json j;
  j["direction"] = to_string(r.direction);
  j["trial_count"] = r.trial_count;
  j["peak"] = {{"force_N", r.peak_force},
               {"time_s", r.peak_time},
               {"trial_mean_N", r.trial_peak_mean},
               {"trial_max_N", r.trial_peak_max}};
  j["noise_floor_N"] = r.noise_floor;
  auto phase = [](const PhaseMetrics& m) {
    return nlohmann::ordered_json{{"start_s", m.start},
                                  {"end_s", m.end},
                                  {"duration_s", m.duration},
                                  {"net_impulse_Ns", m.net_impulse}};
  };
  j["phases"] = {{"pre_thrust", phase(r.pre_thrust)},
                 {"active_thrust", phase(r.active_thrust)},
                 {"rebound", phase(r.rebound)}};
  j["total_impulse_Ns"] = r.total_impulse;
  j["band"] = {{"time_s", r.time}, {"mean_N", r.mean}, {"two_sigma_N", r.band}};
  return j.dump(2) + "\n";
}

void write_band_csv(std::ostream& out, const StrokeReport& r) {
  out << "time_s,mean_N,lower_N,upper_N\n";
  for (std::size_t i = 0; i < r.time.size(); ++i) {
    out << io::sig9(r.time[i]) << ',' << io::sig9(r.mean[i]) << ',' << io::sig9(r.mean[i] - r.band[i]) << ','
        << io::sig9(r.mean[i] + r.band[i]) << '\n';
  }
}

}  // namespace pulsejet::analysis
