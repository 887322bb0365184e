#include "pulsejet/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "pulsejet/config.hpp"
#include "pulsejet/design.hpp"
#include "pulsejet/swim.hpp"
#include "pulsejet/trace_io.hpp"

namespace pulsejet::calib {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool needs(const std::vector<std::string>& metrics, std::string_view suffix) {
  return std::any_of(metrics.begin(), metrics.end(), [&](const std::string& m) {
    return m.size() >= suffix.size() && m.compare(m.size() - suffix.size(), suffix.size(), suffix) == 0;
  });
}

std::string trim_copy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "peak_thrust_down", "peak_thrust_up", "impulse_A_down", "impulse_B_down", "impulse_C_down",
      "impulse_A_up",     "impulse_B_up",   "impulse_C_up",   "peak_speed",     "avg_speed"};
  return names;
}

Dimension metric_dimension(std::string_view name) {
  if (name.starts_with("peak_thrust")) return Dimension::Force;
  if (name.starts_with("impulse")) return Dimension::Impulse;
  if (name.ends_with("speed")) return Dimension::Speed;
  throw ConfigError("unknown calibration metric", std::string(name));
}

TargetSet parse_targets(std::string_view text) {
  const auto doc = parse_document(text);
  TargetSet set;
  std::map<std::string, double> weights;
  for (const auto& [path, entry] : doc) {
    const auto dot = path.find('.');
    const auto section = path.substr(0, dot);
    const auto key = dot == std::string::npos ? std::string{} : path.substr(dot + 1);
    if (section == "targets") {
      const auto& names = metric_names();
      if (std::find(names.begin(), names.end(), key) == names.end()) {
        throw ConfigError("unknown calibration metric", key, entry.line);
      }
      try {
        set.targets.push_back({key, parse_quantity(entry.text, metric_dimension(key)), 1.0});
      } catch (const UnitError& e) {
        throw ConfigError(e.what(), key, entry.line);
      }
    } else if (section == "weights") {
      try {
        std::size_t used = 0;
        double w = std::stod(entry.text, &used);
        if (used != entry.text.size() || !(w >= 0.0)) throw std::invalid_argument("weight");
        weights[key] = w;
      } catch (const std::exception&) {
        throw ConfigError("weight must be a non-negative number", key, entry.line);
      }
    } else if (section == "free") {
      const auto& field = find_field(key);
      const auto sep = entry.text.find("..");
      if (sep == std::string::npos) throw ConfigError("expected 'lo .. hi'", key, entry.line);
      opt::Parameter prm;
      prm.path = key;
      try {
        prm.lo = parse_quantity(trim_copy(entry.text.substr(0, sep)), field.dimension);
        prm.hi = parse_quantity(trim_copy(entry.text.substr(sep + 2)), field.dimension);
      } catch (const UnitError& e) {
        throw ConfigError(e.what(), key, entry.line);
      }
      if (!(prm.lo <= prm.hi)) throw ConfigError("lower bound exceeds upper bound", key, entry.line);
      set.free.push_back(prm);
    } else {
      throw ConfigError("unknown section in targets file", path, entry.line);
    }
  }
  for (const auto& [key, w] : weights) {
    auto it = std::find_if(set.targets.begin(), set.targets.end(), [&](const Target& t) { return t.metric == key; });
    if (it == set.targets.end()) throw ConfigError("weight given for a metric without a target", key);
    it->weight = w;
  }
  return set;
}

TargetSet load_targets_file(const std::filesystem::path& path) { return parse_targets(read_text_file(path)); }

analysis::ForceTrace stroke_trace(const ParamSet& base, analysis::StrokeDirection direction,
                                  std::int64_t* snap_count) {
  ParamSet p = base;
  p.scenario.kind = ScenarioKind::FixedMount;
  p.scenario.n_cycles = 1;
  p.scenario.duration = p.power.cycle_period;
  p.scenario.initial_side = direction == analysis::StrokeDirection::Downstroke ? HubSide::Top : HubSide::Bottom;
  const auto traj = sim::run_scenario(p);
  if (snap_count) *snap_count = traj.frames.back().engine.snap_count;
  std::vector<double> t, f;
  t.reserve(traj.frames.size());
  f.reserve(traj.frames.size());
  for (const auto& fr : traj.frames) {
    t.push_back(fr.time);
    f.push_back(fr.thrust);
  }
  return analysis::make_trace(std::move(t), std::move(f), direction,
                              direction == analysis::StrokeDirection::Downstroke ? "sim_down" : "sim_up");
}

std::map<std::string, double> simulate_metrics(const ParamSet& p, const std::vector<std::string>& metrics) {
  std::map<std::string, double> out;
  for (const auto& m : metrics) out[m] = kNaN;
  auto stroke = [&](analysis::StrokeDirection dir, const char* suffix) {
    if (!needs(metrics, suffix)) return;
    try {
      std::int64_t snaps = 0;
      auto trace = stroke_trace(p, dir, &snaps);
      if (snaps < 1) return;
      const auto report = analysis::build_report({trace});
      const std::string s = suffix;
      out["peak_thrust" + s] = report.peak_force;
      out["impulse_A" + s] = report.pre_thrust.net_impulse;
      out["impulse_B" + s] = report.active_thrust.net_impulse;
      out["impulse_C" + s] = report.rebound.net_impulse;
    } catch (const analysis::AnalysisError&) {
    } catch (const sim::SimulationError&) {
    }
  };
  stroke(analysis::StrokeDirection::Downstroke, "_down");
  stroke(analysis::StrokeDirection::Upstroke, "_up");
  if (needs(metrics, "speed")) {
    try {
      ParamSet q = p;
      q.scenario.kind = ScenarioKind::FreeSwim;
      const auto m = sim::summarize(sim::run_scenario(q));
      if (m.feasible) {
        out["peak_speed"] = m.peak_speed;
        out["avg_speed"] = m.avg_speed;
      }
    } catch (const sim::SimulationError&) {
    }
  }
  // Keep only what was asked for.
  std::map<std::string, double> filtered;
  for (const auto& m : metrics) filtered[m] = out[m];
  return filtered;
}

std::vector<Residual> residuals(const ParamSet& p, const std::vector<Target>& targets) {
  std::vector<std::string> names;
  for (const auto& t : targets) names.push_back(t.metric);
  const auto sim = simulate_metrics(p, names);
  std::vector<Residual> out;
  for (const auto& t : targets) {
    Residual r;
    r.metric = t.metric;
    r.target = t.value;
    r.simulated = sim.at(t.metric);
    r.weight = t.weight;
    const double scale = std::abs(t.value) > 0.0 ? std::abs(t.value) : 1.0;
    r.relative = (r.simulated - t.value) / scale;
    out.push_back(r);
  }
  return out;
}

double residual_score(const std::vector<Residual>& residuals) {
  double s = 0.0;
  for (const auto& r : residuals) {
    if (!std::isfinite(r.relative)) return std::numeric_limits<double>::infinity();
    s += r.weight * r.relative * r.relative;
  }
  return s;
}

CalibrationResult calibrate(const ParamSet& base, const TargetSet& targets, const CalibrationOptions& options) {
  CalibrationResult result;
  result.fitted = base;
  if (!targets.free.empty()) {
    result.fitted_any = true;
    result.layout = design::make_design(base, targets.free);
    auto fn = [&](const opt::DesignVector& d) {
      opt::Evaluation ev;
      ParamSet p;
      try {
        p = design::apply_design(base, d);
      } catch (const InvariantError&) {
        ev.score = std::numeric_limits<double>::infinity();
        ev.feasible = false;
        return ev;
      }
      ev.score = residual_score(residuals(p, targets.targets));
      ev.feasible = std::isfinite(ev.score);
      return ev;
    };
    opt::OptimizeOptions o;
    o.budget = options.budget;
    o.method = options.method;
    o.seed = options.seed;
    o.jobs = options.jobs;
    o.initial_step = options.initial_step;
    if (o.method == opt::Method::NelderMead && options.random_probes > 0) {
      opt::OptimizeOptions probe = o;
      probe.method = opt::Method::Random;
      probe.budget = std::min(options.random_probes, o.budget > 0 ? o.budget - 1 : 0);
      auto first = opt::optimize(result.layout, fn, probe);
      // Keep the caller's starting design in the comparison.
      auto start = fn(result.layout);
      opt::DesignVector from = first.best;
      if (!first.best_evaluation.feasible || (start.feasible && start.score < first.best_evaluation.score)) {
        from = result.layout;
      }
      o.budget -= first.log.size() + 1;
      auto second = opt::optimize(from, fn, o);
      result.search = second;
      result.search.log = first.log;
      double best = first.log.empty() ? std::numeric_limits<double>::infinity() : first.log.back().best_so_far;
      for (auto entry : second.log) {
        entry.index = result.search.log.size();
        best = std::min(best, entry.feasible ? entry.score : std::numeric_limits<double>::infinity());
        entry.best_so_far = best;
        result.search.log.push_back(std::move(entry));
      }
      if (!second.best_evaluation.feasible ||
          (first.best_evaluation.feasible && first.best_evaluation.score < second.best_evaluation.score)) {
        result.search.best = first.best;
        result.search.best_evaluation = first.best_evaluation;
      }
    } else {
      result.search = opt::optimize(result.layout, fn, o);
    }
    result.fitted = design::apply_design(base, result.search.best);
  }
  result.residuals = residuals(result.fitted, targets.targets);
  result.score = residual_score(result.residuals);
  result.feasible = std::isfinite(result.score);
  return result;
}

std::string residual_table_csv(const std::vector<Residual>& residuals) {
  std::ostringstream os;
  os << "metric,target,simulated,relative_residual,weight\n";
  for (const auto& r : residuals) {
    os << r.metric << ',' << io::sig9(r.target) << ',' << io::sig9(r.simulated) << ',' << io::sig9(r.relative) << ','
       << io::sig9(r.weight) << '\n';
  }
  return os.str();
}

std::string residual_report_json(const CalibrationResult& result) {
  nlohmann::ordered_json j;
  j["feasible"] = result.feasible;
  j["score"] = std::isfinite(result.score) ? nlohmann::ordered_json(result.score) : nlohmann::ordered_json(nullptr);
  j["evaluations"] = result.search.log.size();
  auto& rows = j["residuals"] = nlohmann::ordered_json::array();
  for (const auto& r : result.residuals) {
    nlohmann::ordered_json row;
    row["metric"] = r.metric;
    row["target"] = r.target;
    row["simulated"] = std::isfinite(r.simulated) ? nlohmann::ordered_json(r.simulated) : nlohmann::ordered_json(nullptr);
    row["relative_residual"] =
        std::isfinite(r.relative) ? nlohmann::ordered_json(r.relative) : nlohmann::ordered_json(nullptr);
    row["weight"] = r.weight;
    rows.push_back(row);
  }
  auto& fitted = j["fitted"] = nlohmann::ordered_json::object();
  for (const auto& e : result.layout.entries) fitted[e.path] = get_param(result.fitted, e.path);
  return j.dump(2) + "\n";
}

std::string fitted_overlay(const CalibrationResult& result) {
  std::vector<std::string> paths;
  for (const auto& e : result.layout.entries) paths.push_back(e.path);
  return serialize_overlay(result.fitted, paths);
}

}  // namespace pulsejet::calib
