#include "pulsejet/params.hpp"

#include <cmath>

namespace pulsejet {
namespace {

class Checker {
 public:
  void require(bool ok, const char* field, const char* rule) {
    if (!ok) out_.push_back({field, rule});
  }
  void positive(double v, const char* field) { require(std::isfinite(v) && v > 0.0, field, "> 0"); }
  void finite(double v, const char* field) { require(std::isfinite(v), field, "finite"); }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const ParamSet& p) {
  Checker c;
  const auto& a = p.actuator;
  c.positive(a.wire_diameter, "actuator.wire_diameter");
  c.positive(a.coil_diameter, "actuator.coil_diameter");
  c.require(a.wire_diameter < a.coil_diameter, "actuator.wire_diameter", "wire_diameter < coil_diameter");
  c.positive(a.coil_length, "actuator.coil_length");
  c.positive(a.max_stroke, "actuator.max_stroke");
  c.positive(a.pitch, "actuator.pitch");
  c.require(a.active_turns >= 1, "actuator.active_turns", "active_turns >= 1");
  c.positive(a.shear_modulus_martensite, "actuator.shear_modulus_martensite");
  c.require(a.shear_modulus_austenite > a.shear_modulus_martensite, "actuator.shear_modulus_austenite",
            "G_A > G_M");
  const auto& t = a.transition_temps;
  c.require(t.austenite_start < t.austenite_finish, "actuator.austenite_start", "A_s < A_f");
  c.require(t.martensite_finish < t.martensite_start, "actuator.martensite_finish", "M_f < M_s");
  c.require(t.martensite_finish < t.austenite_finish, "actuator.martensite_finish", "M_f < A_f");
  c.positive(a.electrical_resistance, "actuator.electrical_resistance");
  c.positive(a.thermal_capacitance, "actuator.thermal_capacitance");
  c.positive(a.convective_coefficient_area_product, "actuator.convective_coefficient_area_product");
  c.positive(a.pre_stretch, "actuator.pre_stretch");

  const auto& e = p.engine;
  c.positive(e.hub_travel, "engine.hub_travel");
  c.require(e.hub_travel <= a.max_stroke, "engine.hub_travel", "hub_travel <= max_stroke");
  c.positive(e.hub_moving_mass, "engine.hub_moving_mass");
  c.require(e.hub_damping >= 0.0, "engine.hub_damping", ">= 0");
  c.positive(e.barrier_peak_force, "engine.barrier_peak_force");
  c.require(e.stop_restitution >= 0.0 && e.stop_restitution <= 1.0, "engine.stop_restitution",
            "restitution ∈ [0,1]");
  c.finite(e.barrier_bias_force, "engine.barrier_bias_force");

  const auto& r = p.robot;
  c.positive(r.total_mass, "robot.total_mass");
  c.positive(r.bell_mass, "robot.bell_mass");
  c.require(r.bell_mass < r.total_mass, "robot.bell_mass", "bell_mass < total_mass");
  c.positive(r.body_length, "robot.body_length");
  c.positive(r.body_diameter, "robot.body_diameter");
  c.positive(r.bell_volume_rest, "robot.bell_volume_rest");
  c.positive(r.bell_stiffness_peak_force, "robot.bell_stiffness_peak_force");
  c.positive(r.jet_orifice_area, "robot.jet_orifice_area");
  c.positive(r.drag_coefficient, "robot.drag_coefficient");
  c.require(r.added_mass_coefficient >= 0.0, "robot.added_mass_coefficient", ">= 0");
  c.positive(r.frontal_area, "robot.frontal_area");
  c.positive(r.water_density, "robot.water_density");
  c.finite(r.water_temperature, "robot.water_temperature");
  c.require(r.intake_thrust_factor >= 0.0 && r.intake_thrust_factor <= 1.0, "robot.intake_thrust_factor",
            "β ∈ [0,1]");
  c.require(r.linkage_ratio >= 0.0, "robot.linkage_ratio", ">= 0");

  const auto& w = p.power;
  c.positive(w.supply_voltage, "power.supply_voltage");
  c.positive(w.supply_current, "power.supply_current");
  c.require(w.on_duration >= 0.0, "power.on_duration", ">= 0");
  c.require(w.on_duration < w.cycle_period, "power.on_duration", "on_duration < cycle_period");
  c.require(w.pair_split_fraction > 0.0 && w.pair_split_fraction <= 1.0, "power.pair_split_fraction",
            "split ∈ (0,1]");

  const auto& s = p.stroke;
  c.positive(s.delta_volume, "stroke.delta_volume");
  c.positive(s.expansion_duration, "stroke.expansion_duration");
  c.positive(s.contraction_duration, "stroke.contraction_duration");

  const auto& sc = p.scenario;
  c.require(sc.n_cycles >= 0, "scenario.n_cycles", ">= 0");
  c.positive(sc.duration, "scenario.duration");
  c.positive(sc.dt, "scenario.dt");
  c.require(sc.output_decimation >= 1, "scenario.output_decimation", ">= 1");
  c.require(sc.speed_window >= 1, "scenario.speed_window", ">= 1");
  return c.take();
}

std::string format_violations(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.field + ": " + v.rule;
  }
  return out;
}

}  // namespace pulsejet
