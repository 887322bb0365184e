#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_paths.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("pulsejet_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path out_dir(const std::string& name) {
  auto d = scratch() / name;
  fs::remove_all(d);
  return d;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + PULSEJET_CLI + "\" " + args + " >>\"" +
                          (scratch() / "log.txt").string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

std::string golden(const std::string& dir) {
  std::string s;
  for (int k = 1; k <= 3; ++k)
    s += " \"" + (test_paths::source_dir() / "data" / "golden" / (dir + "_trial" + std::to_string(k) + ".csv")).string() + "\"";
  return s;
}

}  // namespace

TEST_SUITE("cli_harness") {
  TEST_CASE("simulate free swim") {
    const auto d = out_dir("sim");
    REQUIRE(run("simulate --cycles 7 --svg --out \"" + d.string() + "\"") == 0);
    const auto rows = read_csv(d / "trace.csv");
    REQUIRE(rows.size() > 2);
    CHECK(rows[0].size() == 12);
    CHECK(rows[0][0] == "time_s");
    CHECK(rows[0][11] == "drag_N");
    CHECK(std::stod(rows.back()[column(rows[0], "body_pos_m")]) > 0.0);
    for (const char* f : {"metrics.json", "manifest.json", "thrust.svg", "speed.svg"}) CHECK(fs::exists(d / f));
    const auto m = nlohmann::json::parse(slurp(d / "manifest.json"));
    CHECK(m["command"] == "simulate");
    CHECK(m["config_hash"].get<std::string>().size() == 16);
    CHECK(m.contains("timestamp"));
    CHECK(m["outputs"].size() >= 2);
  }

  TEST_CASE("fixed mount pins the body") {
    const auto d = out_dir("fixed");
    REQUIRE(run("simulate --scenario fixed-mount --cycles 2 --out \"" + d.string() + "\"") == 0);
    const auto rows = read_csv(d / "trace.csv");
    const auto c = column(rows[0], "body_pos_m");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][c]) == 0.0);
  }

  TEST_CASE("json trace format and environment output directory") {
    const auto d = out_dir("env");
    REQUIRE(run("simulate --cycles 1 --format json --out \"" + d.string() + "\"") == 0);
    const auto j = nlohmann::json::parse(slurp(d / "trace.json"));
    CHECK(j.is_object());
    const auto e = out_dir("envvar");
    fs::create_directories(e);
    const std::string cmd = "PULSEJET_OUT_DIR=\"" + e.string() + "\" ";
    CHECK(std::system((cmd + "\"" + PULSEJET_CLI + "\" simulate --cycles 1 >/dev/null 2>&1").c_str()) == 0);
    CHECK(fs::exists(e / "trace.csv"));
  }

  TEST_CASE("exit codes") {
    const auto d = out_dir("codes").string();
    CHECK(run("simulate --duration \"0 s\" --out \"" + d + "\"") == 1);
    CHECK(run("simulate --config /nonexistent.toml --out \"" + d + "\"") == 1);
    CHECK(run("simulate --set robot.linkage_ratio=abc --out \"" + d + "\"") == 1);
    CHECK(run("simulate --set robot.no_such=1 --out \"" + d + "\"") == 1);
    CHECK(run("simulate --scenario sideways --out \"" + d + "\"") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("simulate --set \"scenario.dt=0.05 s\" --out \"" + d + "\"") == 2);
    CHECK(run("sweep --param robot.no_such --from 1 --to 2 --out \"" + d + "\"") == 1);
    const auto bad = scratch() / "bad.toml";
    std::ofstream(bad) << "[actuator]\ncoil_diameter = \"0.381 mm\"\n";
    CHECK(run("simulate --config \"" + bad.string() + "\" --out \"" + d + "\"") == 1);
  }

  TEST_CASE("analyze the shipped trials") {
    const auto d = out_dir("analyze");
    REQUIRE(run("analyze --direction down --band" + golden("down") + " --svg --out \"" + d.string() + "\"") == 0);
    const auto r = nlohmann::json::parse(slurp(d / "report.json"));
    CHECK(r["trial_count"] == 3);
    const double step = 0.002;
    CHECK(std::abs(r["phases"]["pre_thrust"]["duration_s"].get<double>() - 0.200) <= step + 1e-9);
    CHECK(std::abs(r["phases"]["active_thrust"]["duration_s"].get<double>() - 0.140) <= step + 1e-9);
    CHECK(std::abs(r["phases"]["rebound"]["duration_s"].get<double>() - 0.660) <= step + 1e-9);
    CHECK(fs::exists(d / "band.csv"));
    CHECK(fs::exists(d / "report.svg"));
  }

  TEST_CASE("analyze one simulated trace and bad files") {
    const auto s = out_dir("stroke");
    REQUIRE(run("simulate --scenario fixed-mount --cycles 1 --out \"" + s.string() + "\"") == 0);
    const auto d = out_dir("analyze1");
    REQUIRE(run("analyze --direction up \"" + (s / "trace.csv").string() + "\" --out \"" + d.string() + "\"") == 0);
    CHECK(nlohmann::json::parse(slurp(d / "report.json"))["trial_count"] == 1);

    const auto empty = scratch() / "empty.csv";
    std::ofstream(empty).close();
    const auto e = out_dir("analyze_empty");
    CHECK(run("analyze \"" + empty.string() + "\" --out \"" + e.string() + "\"") != 0);
    const auto mixed = out_dir("analyze_mixed");
    CHECK(run("analyze --direction down \"" + empty.string() + "\"" + golden("down") + " --out \"" + mixed.string() +
              "\"") == 0);
    CHECK(nlohmann::json::parse(slurp(mixed / "report.json"))["trial_count"] == 3);
  }

  TEST_CASE("outputs are reproducible byte for byte") {
    const auto a = out_dir("rep_a");
    const auto b = out_dir("rep_b");
    for (const auto& d : {a, b}) REQUIRE(run("simulate --cycles 2 --svg --out \"" + d.string() + "\"") == 0);
    for (const char* f : {"trace.csv", "metrics.json", "thrust.svg", "speed.svg"}) CHECK(slurp(a / f) == slurp(b / f));
    auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
    auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
    ma.erase("timestamp");
    mb.erase("timestamp");
    CHECK(ma == mb);

    const auto c = out_dir("rep_c");
    const auto e = out_dir("rep_d");
    for (const auto& d : {c, e})
      REQUIRE(run("optimize --objective max-surrogate-thrust --param \"stroke.contraction_duration=0.1 s..0.5 s\" "
                  "--method random --budget 20 --seed 7 --jobs 2 --out \"" + d.string() + "\"") == 0);
    CHECK(slurp(c / "optimize_log.csv") == slurp(e / "optimize_log.csv"));
    CHECK(slurp(c / "best.toml") == slurp(e / "best.toml"));
  }

  TEST_CASE("one-step sweep matches simulate") {
    const auto s = out_dir("sw_sim");
    REQUIRE(run("simulate --out \"" + s.string() + "\"") == 0);
    const auto m = nlohmann::json::parse(slurp(s / "metrics.json"));
    const auto w = out_dir("sw_one");
    REQUIRE(run("sweep --param power.on_duration --from \"1.993 s\" --to \"1.993 s\" --steps 1 --out \"" +
                w.string() + "\"") == 0);
    const auto rows = read_csv(w / "sweep.csv");
    REQUIRE(rows.size() == 2);
    const auto& h = rows[0];
    const auto& r = rows[1];
    auto close = [](const std::string& cell, double v) { return std::abs(std::stod(cell) - v) <= 1e-8 * std::abs(v) + 1e-15; };
    CHECK(close(r[column(h, "mean_thrust_N")], m["mean_active_thrust_N"].get<double>()));
    CHECK(close(r[column(h, "net_impulse_per_stroke_Ns")], m["net_impulse_per_stroke_Ns"].get<double>()));
    CHECK(close(r[column(h, "peak_speed_mps")], m["peak_speed_mps"].get<double>()));
    CHECK(close(r[column(h, "avg_speed_mps")], m["avg_speed_mps"].get<double>()));
    CHECK(std::stoi(r[column(h, "snap_count")]) == m["snap_count"].get<int>());
  }

  TEST_CASE("contraction-time sweep follows the inverse-square law") {
    const auto d = out_dir("sw_tau");
    REQUIRE(run("sweep --mode surrogate --param stroke.contraction_duration --from \"0.07 s\" --to \"0.28 s\" "
                "--steps 12 --out \"" + d.string() + "\"") == 0);
    const auto rows = read_csv(d / "sweep.csv");
    REQUIRE(rows.size() == 13);
    const auto cv = column(rows[0], "value");
    const auto ct = column(rows[0], "mean_thrust_N");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = 12;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double x = std::log(std::stod(rows[i][cv])), y = std::log(std::stod(rows[i][ct]));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(slope + 2.0) <= 0.01);
  }

  TEST_CASE("barrier sweep: net impulse is monotone while the engine still snaps") {
    const auto d = out_dir("sw_barrier");
    REQUIRE(run("sweep --param engine.barrier_peak_force --from \"2 N\" --to \"9 N\" --steps 15 --jobs 2 --out \"" +
                d.string() + "\"") == 0);
    const auto rows = read_csv(d / "sweep.csv");
    const auto cf = column(rows[0], "feasible");
    const auto cj = column(rows[0], "net_impulse_per_stroke_Ns");
    int feasible = 0;
    double prev = -INFINITY;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][cf] != "1") continue;
      const double j = std::stod(rows[i][cj]);
      CHECK(j >= prev);
      prev = j;
      ++feasible;
    }
    CHECK(feasible >= 5);
  }

  TEST_CASE("calibrate without free parameters writes the residual report") {
    const auto d = out_dir("cal");
    const auto targets = (test_paths::source_dir() / "data" / "calibration_targets.toml").string();
    REQUIRE(run("calibrate --targets \"" + targets + "\" --free none --out \"" + d.string() + "\"") == 0);
    const auto rows = read_csv(d / "residuals.csv");
    CHECK(rows.size() == 7);
    CHECK(fs::exists(d / "residuals.json"));
    CHECK_FALSE(fs::exists(d / "fitted.toml"));  // nothing was fitted
  }

  TEST_CASE("config command round-trips the defaults") {
    const auto d = scratch() / "dump.toml";
    REQUIRE(std::system(("\"" + std::string(PULSEJET_CLI) + "\" config > \"" + d.string() + "\"").c_str()) == 0);
    const auto e = out_dir("dump_sim");
    CHECK(run("simulate --config \"" + d.string() + "\" --cycles 1 --out \"" + e.string() + "\"") == 0);
    const auto f = out_dir("default_sim");
    CHECK(run("simulate --cycles 1 --out \"" + f.string() + "\"") == 0);
    CHECK(slurp(e / "trace.csv") == slurp(f / "trace.csv"));
  }
}
