// pulsejet command-line harness: simulate, analyze, calibrate, optimize, sweep.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pulsejet/analysis.hpp"
#include "pulsejet/calibrate.hpp"
#include "pulsejet/config.hpp"
#include "pulsejet/design.hpp"
#include "pulsejet/hydro.hpp"
#include "pulsejet/optimizer.hpp"
#include "pulsejet/svg.hpp"
#include "pulsejet/swim.hpp"
#include "pulsejet/trace_io.hpp"

#ifndef PULSEJET_VERSION
#define PULSEJET_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace pulsejet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string scenario;
  int cycles = -1;
  std::string duration;
  std::vector<std::string> sets;
  std::string out;
  std::string format = "csv";
  bool svg = false;
  std::int64_t seed = -1;
  int jobs = 1;
};

fs::path output_dir(const Common& c) {
  fs::path dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv("PULSEJET_OUT_DIR");
    dir = env && *env ? fs::path(env) : fs::path(".");
  }
  fs::create_directories(dir);
  return dir;
}

std::pair<std::string, std::string> split_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("expected path=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

ParamSet resolve_params(const Common& c) {
  ParamSet p = c.config.empty() ? ParamSet{} : load_config_file(c.config, ParamSet{}, false);
  if (!c.scenario.empty()) {
    if (c.scenario == "free-swim") {
      p.scenario.kind = ScenarioKind::FreeSwim;
    } else if (c.scenario == "fixed-mount") {
      p.scenario.kind = ScenarioKind::FixedMount;
    } else {
      throw UsageError("--scenario must be free-swim or fixed-mount");
    }
  }
  if (c.cycles >= 0) {
    p.scenario.n_cycles = c.cycles;
    if (c.duration.empty()) p.scenario.duration = c.cycles * p.power.cycle_period;
  }
  if (!c.duration.empty()) p.scenario.duration = parse_quantity(c.duration, Dimension::Time);
  if (c.seed >= 0) p.scenario.rng_seed = static_cast<int>(c.seed);
  for (const auto& s : c.sets) {
    auto [path, value] = split_assignment(s);
    const auto& f = find_field(path);
    try {
      p = load_config("[" + f.section() + "]\n" + f.key() + " = \"" + value + "\"\n", p, false);
    } catch (const ConfigError& e) {
      // Line numbers refer to the generated one-entry document; drop them.
      std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) msg.erase(0, msg.find(": ") + 2);
      throw ConfigError("--set " + s + ": " + msg);
    }
  }
  if (auto v = validate(p); !v.empty()) throw InvariantError(std::move(v));
  return p;
}

opt::Parameter parse_bound(const std::string& text) {
  auto [path, range] = split_assignment(text);
  const auto& f = find_field(path);
  const auto sep = range.find("..");
  if (sep == std::string::npos) throw UsageError("expected path=lo..hi, got '" + text + "'");
  opt::Parameter p;
  p.path = path;
  p.lo = parse_quantity(range.substr(0, sep), f.dimension);
  p.hi = parse_quantity(range.substr(sep + 2), f.dimension);
  if (!(p.lo <= p.hi)) throw UsageError("empty range for " + path);
  return p;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    f << content;
    files_.push_back(name);
  }

  void manifest(const std::string& command, const std::string& hash) {
    ordered_json j;
    j["command"] = command;
    j["config_hash"] = hash;
    j["tool_version"] = PULSEJET_VERSION;
    j["timestamp"] = timestamp();
    j["outputs"] = files_;
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << j.dump(2) << '\n';
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

ordered_json metrics_json(const sim::TrajectoryMetrics& m) {
  ordered_json j;
  j["peak_thrust_N"] = m.peak_thrust;
  j["mean_active_thrust_N"] = m.mean_active_thrust;
  j["net_impulse_Ns"] = m.net_impulse;
  j["net_impulse_per_stroke_Ns"] = m.net_impulse_per_stroke;
  j["peak_speed_mps"] = m.peak_speed;
  j["avg_speed_mps"] = m.avg_speed;
  j["net_displacement_m"] = m.net_displacement;
  j["electrical_energy_J"] = m.electrical_energy;
  j["snap_count"] = m.snap_count;
  j["feasible"] = m.feasible;
  return j;
}

int cmd_simulate(const Common& c) {
  const ParamSet p = resolve_params(c);
  const auto traj = sim::run_scenario(p);
  Outputs out(output_dir(c));
  std::ostringstream trace;
  if (c.format == "json") {
    io::write_trace_json(trace, traj);
    out.write("trace.json", trace.str());
  } else {
    io::write_trace_csv(trace, traj);
    out.write("trace.csv", trace.str());
  }
  const auto m = sim::summarize(traj);
  out.write("metrics.json", metrics_json(m).dump(2) + "\n");
  if (c.svg) {
    svg::Series thrust{"thrust [N]", {}, {}, "#d62728"};
    svg::Series speed{"speed [mm/s]", {}, {}, "#1f77b4"};
    for (const auto& [t, v] : sim::speed_profile(traj, p.scenario.speed_window)) {
      speed.x.push_back(t);
      speed.y.push_back(v * 1e3);
    }
    for (const auto& f : traj.frames) {
      thrust.x.push_back(f.time);
      thrust.y.push_back(f.thrust);
    }
    out.write("thrust.svg", svg::line_plot({thrust}, "Jet thrust", "time [s]", "thrust [N]"));
    if (p.scenario.kind == ScenarioKind::FreeSwim) {
      out.write("speed.svg", svg::line_plot({speed}, "Swimming speed", "time [s]", "speed [mm/s]"));
    }
  }
  out.manifest("simulate", config_hash(p));
  std::cout << "frames " << traj.frames.size() << ", snaps " << m.snap_count << ", displacement "
            << io::sig9(m.net_displacement) << " m, peak thrust " << io::sig9(m.peak_thrust) << " N\n";
  return kExitOk;
}

int cmd_analyze(const Common& c, const std::vector<std::string>& files, const std::string& direction, bool band) {
  if (files.empty()) throw UsageError("analyze needs at least one trace file");
  analysis::StrokeDirection dir;
  if (direction == "down") {
    dir = analysis::StrokeDirection::Downstroke;
  } else if (direction == "up") {
    dir = analysis::StrokeDirection::Upstroke;
  } else {
    throw UsageError("--direction must be down or up");
  }
  std::vector<analysis::ForceTrace> traces;
  int failures = 0;
  for (const auto& f : files) {
    try {
      traces.push_back(analysis::read_force_csv_file(f, dir));
    } catch (const std::exception& e) {
      std::cerr << f << ": " << e.what() << '\n';
      ++failures;
    }
  }
  if (traces.empty()) {
    std::cerr << "no parseable trace\n";
    return kExitConfig;
  }
  const auto report = analysis::build_report(traces);
  Outputs out(output_dir(c));
  out.write("report.json", analysis::report_json(report));
  if (band) {
    std::ostringstream os;
    analysis::write_band_csv(os, report);
    out.write("band.csv", os.str());
  }
  if (c.svg) {
    svg::Series mean{"mean", report.time, report.mean, "#1f77b4"};
    svg::Series lo{"mean - 2 sigma", report.time, {}, "#9ecae1"};
    svg::Series hi{"mean + 2 sigma", report.time, {}, "#9ecae1"};
    for (std::size_t i = 0; i < report.mean.size(); ++i) {
      lo.y.push_back(report.mean[i] - report.band[i]);
      hi.y.push_back(report.mean[i] + report.band[i]);
    }
    out.write("report.svg", svg::line_plot({lo, hi, mean}, analysis::to_string(dir) + " thrust", "time from peak [s]",
                                           "force [N]"));
  }
  out.manifest("analyze", "");
  std::cout << "trials " << report.trial_count << " (" << failures << " failed), phases "
            << io::sig9(report.pre_thrust.duration) << "/" << io::sig9(report.active_thrust.duration) << "/"
            << io::sig9(report.rebound.duration) << " s, total impulse " << io::sig9(report.total_impulse) << " N*s\n";
  return kExitOk;
}

int cmd_calibrate(const Common& c, const std::string& targets_file, const std::vector<std::string>& free,
                  std::size_t budget, const std::string& method, std::size_t probes) {
  if (targets_file.empty()) throw UsageError("calibrate needs --targets");
  const ParamSet base = resolve_params(c);
  auto targets = calib::load_targets_file(targets_file);
  if (!free.empty()) {
    targets.free.clear();
    for (const auto& f : free) {
      if (f == "none") continue;
      targets.free.push_back(parse_bound(f));
    }
  }
  calib::CalibrationOptions o;
  o.budget = budget;
  o.method = opt::parse_method(method);
  o.seed = c.seed >= 0 ? static_cast<std::uint64_t>(c.seed) : 0;
  o.jobs = c.jobs;
  o.random_probes = probes;
  const auto r = calib::calibrate(base, targets, o);
  Outputs out(output_dir(c));
  out.write("residuals.csv", calib::residual_table_csv(r.residuals));
  out.write("residuals.json", calib::residual_report_json(r));
  if (r.fitted_any) {
    out.write("fitted.toml", calib::fitted_overlay(r));
    std::ostringstream log;
    opt::write_log_csv(log, r.layout, r.search.log);
    out.write("calibration_log.csv", log.str());
  }
  out.manifest("calibrate", config_hash(r.fitted));
  for (const auto& res : r.residuals) {
    std::cout << res.metric << ": target " << io::sig9(res.target) << ", simulated " << io::sig9(res.simulated)
              << ", residual " << io::sig9(100.0 * res.relative) << " %\n";
  }
  if (!r.feasible) std::cout << "calibration infeasible: some metrics could not be produced\n";
  return kExitOk;
}

int cmd_optimize(const Common& c, const std::string& objective, const std::vector<std::string>& params,
                 std::size_t budget, const std::string& method, const std::string& horizon) {
  if (params.empty()) throw UsageError("optimize needs at least one --param path=lo..hi");
  design::Objective obj;
  obj.kind = design::parse_objective(objective);
  obj.base = resolve_params(c);
  if (!horizon.empty()) obj.horizon = parse_quantity(horizon, Dimension::Time);
  std::vector<opt::Parameter> bounds;
  for (const auto& s : params) bounds.push_back(parse_bound(s));
  const auto initial = design::make_design(obj.base, bounds);
  opt::OptimizeOptions o;
  o.budget = budget;
  o.method = opt::parse_method(method);
  o.seed = c.seed >= 0 ? static_cast<std::uint64_t>(c.seed) : 0;
  o.jobs = c.jobs;
  const auto r = opt::optimize(initial, design::objective_function(obj), o);

  Outputs out(output_dir(c));
  std::ostringstream log;
  opt::write_log_csv(log, initial, r.log);
  out.write("optimize_log.csv", log.str());
  const ParamSet best = design::apply_design(obj.base, r.best);
  std::vector<std::string> paths;
  for (const auto& e : r.best.entries) paths.push_back(e.path);
  out.write("best.toml", serialize_overlay(best, paths));
  ordered_json j;
  j["objective"] = design::to_string(obj.kind);
  j["evaluations"] = r.log.size();
  j["restarted"] = r.restarted;
  j["feasible"] = r.best_evaluation.feasible;
  j["score"] = std::isfinite(r.best_evaluation.score) ? ordered_json(r.best_evaluation.score) : ordered_json(nullptr);
  for (const auto& e : r.best.entries) j["best"][e.path] = e.value;
  for (const auto& [k, v] : r.best_evaluation.diagnostics) j["diagnostics"][k] = v;
  out.write("result.json", j.dump(2) + "\n");
  out.manifest("optimize", config_hash(best));
  std::cout << "best score " << io::sig9(r.best_evaluation.score) << (r.best_evaluation.feasible ? "" : " (infeasible)")
            << " after " << r.log.size() << " evaluations\n";
  for (const auto& e : r.best.entries) std::cout << "  " << e.path << " = " << io::sig9(e.value) << '\n';
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& path, const std::string& from, const std::string& to, int steps,
              bool log_spacing, const std::string& mode) {
  if (steps < 1) throw UsageError("--steps must be at least 1");
  const auto& field = find_field(path);
  const ParamSet base = resolve_params(c);
  const double a = parse_quantity(from, field.dimension);
  const double b = parse_quantity(to, field.dimension);
  if (log_spacing && !(a > 0.0 && b > 0.0)) throw UsageError("--log needs positive bounds");
  const bool surrogate = mode == "surrogate";
  if (!surrogate && mode != "simulate") throw UsageError("--mode must be simulate or surrogate");

  std::vector<double> values(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double u = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    values[static_cast<std::size_t>(i)] = log_spacing ? a * std::pow(b / a, u) : a + (b - a) * u;
  }
  struct Row {
    double mean_thrust = 0, net_impulse = 0, peak_speed = 0, avg_speed = 0;
    std::int64_t snaps = 0;
    bool feasible = true;
    std::string error;
  };
  std::vector<Row> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      ParamSet p = base;
      field.set(p, values[i]);
      if (auto v = validate(p); !v.empty()) {
        rows[i].feasible = false;
        rows[i].error = format_violations(v);
        continue;
      }
      if (surrogate) {
        rows[i].mean_thrust = hydro::stroke_mean_thrust(p.stroke, p.robot);
        rows[i].net_impulse = hydro::stroke_net_impulse(p.stroke, p.robot);
        continue;
      }
      try {
        const auto m = sim::summarize(sim::run_scenario(p));
        rows[i] = {m.mean_active_thrust, m.net_impulse_per_stroke, m.peak_speed, m.avg_speed, m.snap_count, m.feasible,
                   {}};
      } catch (const sim::SimulationError& e) {
        rows[i].feasible = false;
        rows[i].error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < std::max(1, c.jobs); ++t) pool.emplace_back(worker);
  }
  std::ostringstream csv;
  csv << "step,parameter,value,mean_thrust_N,net_impulse_per_stroke_Ns,peak_speed_mps,avg_speed_mps,snap_count,feasible\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& r = rows[i];
    csv << i << ',' << path << ',' << io::sig9(values[i]) << ',' << io::sig9(r.mean_thrust) << ','
        << io::sig9(r.net_impulse) << ',' << io::sig9(r.peak_speed) << ',' << io::sig9(r.avg_speed) << ',' << r.snaps
        << ',' << (r.feasible ? 1 : 0) << '\n';
    if (!r.error.empty()) std::cerr << "step " << i << ": " << r.error << '\n';
  }
  Outputs out(output_dir(c));
  out.write("sweep.csv", csv.str());
  if (c.svg) {
    svg::Series s{"mean thrust [N]", values, {}, "#d62728"};
    for (const auto& r : rows) s.y.push_back(r.mean_thrust);
    out.write("sweep.svg", svg::line_plot({s}, "Sweep of " + path, path, "mean thrust [N]"));
  }
  out.manifest("sweep", config_hash(base));
  if (values.size() >= 2 && rows.front().mean_thrust > 0 && rows.back().mean_thrust > 0 && values.front() > 0 &&
      values.back() > 0) {
    const double slope = std::log(rows.back().mean_thrust / rows.front().mean_thrust) /
                         std::log(values.back() / values.front());
    std::cout << "log-log slope of mean thrust: " << io::sig9(slope) << '\n';
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, Common& c, bool scenario_flags) {
  cmd->add_option("--config", c.config, "Parameter file (text or JSON)");
  cmd->add_option("--out", c.out, "Output directory (default $PULSEJET_OUT_DIR or .)");
  cmd->add_flag("--svg", c.svg, "Also write SVG line plots");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--jobs", c.jobs, "Parallel evaluations")->check(CLI::PositiveNumber);
  if (scenario_flags) {
    cmd->add_option("--scenario", c.scenario, "free-swim or fixed-mount");
    cmd->add_option("--cycles", c.cycles, "Number of power cycles (sets the duration unless given)");
    cmd->add_option("--duration", c.duration, "Simulated time, e.g. \"35 s\"");
    cmd->add_option("--set", c.sets, "Override a parameter: path=value");
    cmd->add_option("--format", c.format, "Trace format")->check(CLI::IsMember({"csv", "json"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bistable SMA pulse-jet swimmer model"};
  app.set_version_flag("--version", PULSEJET_VERSION);
  app.require_subcommand(1);

  Common sim_c, ana_c, cal_c, opt_c, sw_c, cfg_c;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write its trace");
  add_common(simulate, sim_c, true);

  auto* analyze = app.add_subcommand("analyze", "Segment thrust traces into stroke phases");
  std::vector<std::string> files;
  std::string direction = "down";
  bool band = false;
  analyze->add_option("files", files, "Force trace CSVs")->required();
  analyze->add_option("--direction", direction, "down or up");
  analyze->add_flag("--band", band, "Write the mean +- 2 sigma band CSV");
  add_common(analyze, ana_c, false);

  auto* calibrate = app.add_subcommand("calibrate", "Fit free parameters to target metrics");
  std::string targets;
  std::vector<std::string> free;
  std::size_t cal_budget = 300;
  std::string cal_method = "nelder-mead";
  calibrate->add_option("--targets", targets, "Targets file")->required();
  calibrate->add_option("--free", free, "Free parameter path=lo..hi (replaces the file's list; 'none' for no fit)");
  calibrate->add_option("--budget", cal_budget, "Evaluation budget");
  calibrate->add_option("--method", cal_method, "nelder-mead, grid or random");
  std::size_t cal_probes = 0;
  calibrate->add_option("--probes", cal_probes, "Random designs tried before Nelder-Mead starts");
  add_common(calibrate, cal_c, true);

  auto* optimize = app.add_subcommand("optimize", "Search design parameters for an objective");
  std::string objective = "max-avg-speed";
  std::vector<std::string> params;
  std::size_t opt_budget = 100;
  std::string opt_method = "nelder-mead";
  std::string horizon;
  optimize->add_option("--objective", objective,
                       "max-avg-speed, max-net-impulse-per-stroke, min-energy-per-distance, max-surrogate-thrust");
  optimize->add_option("--param", params, "Design parameter path=lo..hi")->required();
  optimize->add_option("--budget", opt_budget, "Evaluation budget");
  optimize->add_option("--method", opt_method, "nelder-mead, grid or random");
  optimize->add_option("--horizon", horizon, "Evaluation horizon, e.g. \"20 s\"");
  add_common(optimize, opt_c, true);

  auto* sweep = app.add_subcommand("sweep", "Tabulate metrics against one parameter");
  std::string sw_path, sw_from, sw_to, sw_mode = "simulate";
  int sw_steps = 11;
  bool sw_log = false;
  sweep->add_option("--param", sw_path, "Parameter path")->required();
  sweep->add_option("--from", sw_from, "Start value with unit")->required();
  sweep->add_option("--to", sw_to, "End value with unit")->required();
  sweep->add_option("--steps", sw_steps, "Number of points");
  sweep->add_flag("--log", sw_log, "Geometric spacing");
  sweep->add_option("--mode", sw_mode, "simulate or surrogate");
  add_common(sweep, sw_c, true);

  auto* config = app.add_subcommand("config", "Print the resolved parameter set");
  bool as_json = false;
  config->add_flag("--json", as_json, "JSON instead of text");
  add_common(config, cfg_c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim_c);
    if (*analyze) return cmd_analyze(ana_c, files, direction, band);
    if (*calibrate) return cmd_calibrate(cal_c, targets, free, cal_budget, cal_method, cal_probes);
    if (*optimize) return cmd_optimize(opt_c, objective, params, opt_budget, opt_method, horizon);
    if (*sweep) return cmd_sweep(sw_c, sw_path, sw_from, sw_to, sw_steps, sw_log, sw_mode);
    if (*config) {
      const auto p = resolve_params(cfg_c);
      std::cout << (as_json ? serialize_json(p) : serialize(p));
      return kExitOk;
    }
  } catch (const InvariantError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnitError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sim::SimulationError& e) {
    std::cerr << "simulation diverged at frame " << e.frame_index() << ": " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
