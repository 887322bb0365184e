#include "doctest.h"

#include <random>
#include <sstream>

#include "json.hpp"
#include "pulsejet/config.hpp"
#include "pulsejet/params.hpp"
#include "pulsejet/units.hpp"
#include "test_paths.hpp"

using namespace pulsejet;

TEST_SUITE("model_params") {
  TEST_CASE("defaults carry the prototype geometry and validate cleanly") {
    ParamSet p;
    CHECK(p.actuator.wire_diameter == 0.381e-3);
    CHECK(p.actuator.coil_diameter == 3.0e-3);
    CHECK(p.actuator.coil_length == 40.0e-3);
    CHECK(p.actuator.max_stroke == 2.1e-3);
    CHECK(p.actuator.pitch == 0.5e-3);
    CHECK(p.actuator.active_turns == 18);
    CHECK(p.robot.total_mass == 0.186);
    CHECK(p.robot.bell_mass == 0.0646);
    CHECK(p.robot.body_length == 0.2286);
    CHECK(p.robot.body_diameter == 0.110);
    CHECK(p.robot.bell_volume_rest == doctest::Approx(1113.9e-6).epsilon(1e-15));
    CHECK(p.power.supply_voltage == 15.0);
    CHECK(p.power.supply_current == 8.0);
    CHECK(p.power.cycle_period == 5.0);
    CHECK(p.actuator.transition_temps.austenite_start == 68.0);
    CHECK(p.actuator.transition_temps.martensite_finish == 42.0);
    CHECK(validate(p).empty());
  }

  TEST_CASE("shipped default file equals the built-in defaults") {
    const auto p = load_config_file(test_paths::source_dir() / "config/default.toml");
    CHECK(p == ParamSet{});
  }

  TEST_CASE("coil_diameter equal to wire_diameter is rejected") {
    const std::string doc = "[actuator]\ncoil_diameter = \"0.381 mm\"\n";
    try {
      load_config(doc);
      FAIL("expected an invariant violation");
    } catch (const InvariantError& e) {
      REQUIRE(e.violations().size() == 1);
      CHECK(e.violations()[0].rule == "wire_diameter < coil_diameter");
    }
  }

  TEST_CASE("override keeps every other field at its default") {
    const auto p = load_config("[robot]\ntotal_mass = \"0.2 kg\"\n");
    ParamSet expected;
    expected.robot.total_mass = 0.2;
    CHECK(p == expected);
  }

  TEST_CASE("validate names the violated rule") {
    ParamSet p;
    p.actuator.transition_temps.austenite_start = 90;
    p.actuator.transition_temps.austenite_finish = 70;
    auto v = validate(p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "A_s < A_f");

    ParamSet q;
    q.robot.intake_thrust_factor = 1.5;
    v = validate(q);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "β ∈ [0,1]");
    CHECK(v[0].field == "robot.intake_thrust_factor");
  }

  TEST_CASE("validate covers the remaining ordering rules") {
    ParamSet p;
    p.actuator.transition_temps.martensite_finish = 60;  // M_f > M_s
    CHECK(format_violations(validate(p)).find("M_f < M_s") != std::string::npos);
    ParamSet q;
    q.actuator.shear_modulus_austenite = q.actuator.shear_modulus_martensite;
    CHECK(format_violations(validate(q)).find("G_A > G_M") != std::string::npos);
    ParamSet r;
    r.power.on_duration = r.power.cycle_period;
    CHECK(format_violations(validate(r)).find("on_duration < cycle_period") != std::string::npos);
    ParamSet s;
    s.robot.bell_mass = s.robot.total_mass;
    CHECK_FALSE(validate(s).empty());
    ParamSet t;
    t.scenario.duration = 0.0;
    CHECK_FALSE(validate(t).empty());
  }

  TEST_CASE("parse errors report line and field") {
    try {
      load_config("[actuator]\n\nwire_diameter = \"0.381\"\n");
      FAIL("missing unit accepted");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 3);
      CHECK(e.field() == "actuator.wire_diameter");
    }
    CHECK_THROWS_AS(load_config("[actuator\nwire_diameter = \"1 mm\"\n"), ConfigError);
    CHECK_THROWS_AS(load_config("[actuator]\nwire_diam = \"1 mm\"\n"), ConfigError);
    CHECK_THROWS_AS(load_config("[actuator]\nwire_diameter = \"1 kg\"\n"), ConfigError);
    CHECK_THROWS_AS(load_config("[actuator]\nwire_diameter = \"0.3 mm\"\nwire_diameter = \"0.3 mm\"\n"),
                    ConfigError);
    CHECK_THROWS_AS(load_config("[scenario]\nkind = \"orbit\"\n"), ConfigError);
  }

  TEST_CASE("units convert to SI") {
    CHECK(parse_quantity("0.381 mm", Dimension::Length) == 0.381e-3);
    CHECK(parse_quantity("186 g", Dimension::Mass) == 0.186);
    CHECK(parse_quantity("1113.9 cm3", Dimension::Volume) == 1113.9e-6);
    CHECK(parse_quantity("7.5 GPa", Dimension::Pressure) == 7.5e9);
    CHECK(parse_quantity("341.15 K", Dimension::Temperature) == doctest::Approx(68.0));
    CHECK(parse_quantity("2.1e3 um", Dimension::Length) == 2.1e-3);
    CHECK(parse_quantity("-4 N", Dimension::Force) == -4.0);
    CHECK(parse_quantity("0.3", Dimension::Dimensionless) == 0.3);
    CHECK_THROWS_AS(parse_quantity("0.3 mm", Dimension::Dimensionless), UnitError);
    CHECK_THROWS_AS(parse_quantity("abc", Dimension::Length), UnitError);
  }

  TEST_CASE("text and JSON documents are equivalent") {
    const auto text = load_config("[robot]\ntotal_mass = \"200 g\"\n[scenario]\nkind = \"fixed-mount\"\nn_cycles = 2\n");
    const auto json = load_config(R"({"robot": {"total_mass": "200 g"}, "scenario": {"kind": "fixed-mount", "n_cycles": 2}})");
    CHECK(text == json);
    CHECK(load_config(serialize_json(text)) == text);
  }

  TEST_CASE("serialize round-trips defaults and random parameter sets") {
    CHECK(load_config(serialize(ParamSet{})) == ParamSet{});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int k = 0; k < 200; ++k) {
      ParamSet p;
      for (const auto& f : config_fields()) {
        if (f.kind == FieldKind::Real && f.dimension != Dimension::Temperature) f.set(p, f.get(p) * u(rng));
      }
      const auto q = load_config(serialize(p), ParamSet{}, false);
      CHECK(q == p);
      CHECK(config_hash(q) == config_hash(p));
    }
  }

  TEST_CASE("config hash tracks the resolved parameters") {
    ParamSet a, b;
    CHECK(config_hash(a) == config_hash(b));
    b.power.on_duration += 1e-9;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
  }

  TEST_CASE("parameter paths resolve through the schema") {
    ParamSet p;
    set_param(p, "power.on_duration", 2.5);
    CHECK(p.power.on_duration == 2.5);
    CHECK(get_param(p, "engine.barrier_peak_force") == 6.0);
    CHECK_THROWS_AS(set_param(p, "power.no_such_field", 1.0), ConfigError);
    const auto overlay = serialize_overlay(p, {"power.on_duration"});
    CHECK(load_config(overlay, ParamSet{}).power.on_duration == 2.5);
  }
}
