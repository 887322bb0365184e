#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pulsejet::opt {

// One named box-bounded parameter, addressed by config path.
struct Parameter {
  std::string path;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct DesignVector {
  std::vector<Parameter> entries;

  Eigen::Index size() const { return static_cast<Eigen::Index>(entries.size()); }
  Eigen::VectorXd values() const;
  Eigen::VectorXd lower() const;
  Eigen::VectorXd upper() const;
  // Copy with new values projected onto the box.
  DesignVector with_values(const Eigen::VectorXd& x) const;
  bool in_bounds() const;
};

struct Evaluation {
  double score = 0.0;  // minimized
  bool feasible = true;
  std::map<std::string, double> diagnostics;
};

using ObjectiveFn = std::function<Evaluation(const DesignVector&)>;

enum class Method { NelderMead, Grid, Random };

struct OptimizeOptions {
  std::size_t budget = 100;
  Method method = Method::NelderMead;
  std::uint64_t seed = 0;
  int jobs = 1;
  int grid_points = 0;        // per axis; 0 picks floor(budget^(1/d))
  double initial_step = 0.1;  // Nelder-Mead simplex edge, fraction of each range
  double x_tolerance = 1e-9;  // simplex collapse, in range-normalized units
  double f_tolerance = 1e-12;
};

struct LogEntry {
  std::size_t index = 0;
  Eigen::VectorXd values;
  double score = 0.0;
  bool feasible = true;
  double best_so_far = 0.0;  // best feasible score up to and including this entry
};

struct OptimizeResult {
  DesignVector best;
  Evaluation best_evaluation;
  std::vector<LogEntry> log;
  bool restarted = false;
};

OptimizeResult optimize(const DesignVector& initial, const ObjectiveFn& objective, const OptimizeOptions& options);

// Grid nodes in evaluation order (last axis varies fastest).
std::vector<Eigen::VectorXd> grid_points(const DesignVector& layout, int points_per_axis);

void write_log_csv(std::ostream& out, const DesignVector& layout, const std::vector<LogEntry>& log);

Method parse_method(const std::string& name);

}  // namespace pulsejet::opt
