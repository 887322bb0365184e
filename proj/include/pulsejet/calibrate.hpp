#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pulsejet/analysis.hpp"
#include "pulsejet/optimizer.hpp"
#include "pulsejet/params.hpp"
#include "pulsejet/units.hpp"

namespace pulsejet::calib {

// Metric names accepted in a targets file.
const std::vector<std::string>& metric_names();
Dimension metric_dimension(std::string_view name);

struct Target {
  std::string metric;
  double value = 0.0;
  double weight = 1.0;
};

struct TargetSet {
  std::vector<Target> targets;
  std::vector<opt::Parameter> free;  // value unset; bounds only
};

// Sections: [targets] metric = "4.66 N", [weights] metric = 0.5,
// [free] config.path = "0.5 mm .. 2 mm".
TargetSet parse_targets(std::string_view text);
TargetSet load_targets_file(const std::filesystem::path& path);

// Single fixed-mount stroke starting from the given stop, 500 Hz trace.
analysis::ForceTrace stroke_trace(const ParamSet& p, analysis::StrokeDirection direction,
                                  std::int64_t* snap_count = nullptr);

// Simulated values for the requested metrics. A metric the model cannot
// produce (no snap, unsegmentable trace) is NaN.
std::map<std::string, double> simulate_metrics(const ParamSet& p, const std::vector<std::string>& metrics);

struct Residual {
  std::string metric;
  double target = 0.0;
  double simulated = 0.0;
  double relative = 0.0;  // (simulated - target) / |target|
  double weight = 1.0;
};

// Weighted sum of squared relative residuals; +inf when any metric is NaN.
double residual_score(const std::vector<Residual>& residuals);
std::vector<Residual> residuals(const ParamSet& p, const std::vector<Target>& targets);

struct CalibrationOptions {
  std::size_t budget = 300;
  opt::Method method = opt::Method::NelderMead;
  std::uint64_t seed = 0;
  int jobs = 1;
  double initial_step = 0.15;
  // Nelder-Mead only: this many seeded random designs are evaluated first
  // (in parallel) and the search starts from the best of them. Counts
  // against the budget.
  std::size_t random_probes = 0;
};

struct CalibrationResult {
  ParamSet fitted;
  std::vector<Residual> residuals;
  double score = 0.0;
  bool fitted_any = false;  // false when the free list is empty
  bool feasible = true;
  opt::OptimizeResult search;
  opt::DesignVector layout;
};

CalibrationResult calibrate(const ParamSet& base, const TargetSet& targets, const CalibrationOptions& options = {});

std::string residual_table_csv(const std::vector<Residual>& residuals);
std::string residual_report_json(const CalibrationResult& result);
// Overlay document with only the free parameters, loadable on top of a config.
std::string fitted_overlay(const CalibrationResult& result);

}  // namespace pulsejet::calib
