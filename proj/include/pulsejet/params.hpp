#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pulsejet {

// Transformation temperatures of the SMA alloy [degC].
struct TransitionTemps {
  double austenite_start = 68.0;
  double austenite_finish = 78.0;
  double martensite_start = 52.0;
  double martensite_finish = 42.0;

  bool operator==(const TransitionTemps&) const = default;
};

// One silicone-insulated SMA coil. SI units, temperatures in degC.
struct ActuatorParams {
  double wire_diameter = 0.381e-3;
  double coil_diameter = 3.0e-3;  // mean coil diameter
  double coil_length = 40.0e-3;
  double max_stroke = 2.1e-3;
  double pitch = 0.5e-3;
  int active_turns = 18;
  double shear_modulus_martensite = 7.5e9;
  double shear_modulus_austenite = 25.0e9;
  TransitionTemps transition_temps;
  double electrical_resistance = 1.4;
  double thermal_capacitance = 1.2;                     // J/K
  double convective_coefficient_area_product = 0.6211;  // W/K, calibrated
  // Installed extension at the far stop. Sized so a heated pair can pull
  // through the barrier; the bare coil formula is far too soft otherwise.
  double pre_stretch = 45.0e-3;

  bool operator==(const ActuatorParams&) const = default;
};

struct RobotParams {
  double total_mass = 0.186;
  double bell_mass = 0.0646;
  double body_length = 0.2286;
  double body_diameter = 0.110;
  double bell_volume_rest = 1113.9e-6;
  double bell_stiffness_peak_force = 6.0;
  // Calibrated. The drag coefficient also absorbs tether and trim losses.
  double jet_orifice_area = 3.239e-3;
  double drag_coefficient = 36.46;
  double added_mass_coefficient = 1.261;
  double frontal_area = 9.503317777109125e-3;  // pi/4 * (110 mm)^2
  double water_density = 1000.0;
  double water_temperature = 20.0;
  double intake_thrust_factor = 0.6490;  // calibrated
  double linkage_ratio = 3.818;          // calibrated

  double bell_radius_rest() const { return 0.5 * body_diameter; }

  bool operator==(const RobotParams&) const = default;
};

struct EngineParams {
  double hub_travel = 2.100e-3;  // stop to stop, calibrated; stops at +-hub_travel/2
  // Effective inertia seen by the hub, dominated by the water slug driven
  // through the orifice (reflected through the bell geometry).
  double hub_moving_mass = 50.0;
  double hub_damping = 30.0;
  double barrier_peak_force = 6.0;
  double stop_restitution = 0.3;
  // Constant axial bias on the hub (positive toward the top stop). Zero for
  // a mirror-symmetric engine; the calibrated value favours the downstroke.
  double barrier_bias_force = -2.963;

  double half_travel() const { return 0.5 * hub_travel; }

  bool operator==(const EngineParams&) const = default;
};

struct PowerProtocol {
  double supply_voltage = 15.0;
  double supply_current = 8.0;
  double on_duration = 1.993;  // calibrated
  double cycle_period = 5.0;
  double pair_split_fraction = 0.5;
  // Cut power to the active pair as soon as the hub has crossed mid-travel.
  bool snap_cutoff = false;

  bool operator==(const PowerProtocol&) const = default;
};

// Constant-rate stroke used by the closed-form thrust law.
struct StrokeProfile {
  double delta_volume = 1.0e-4;
  double expansion_duration = 1.0;
  double contraction_duration = 0.14;

  bool operator==(const StrokeProfile&) const = default;
};

enum class ScenarioKind { FreeSwim, FixedMount };
enum class HubSide { Bottom, Top };

struct Scenario {
  ScenarioKind kind = ScenarioKind::FreeSwim;
  int n_cycles = 7;
  double duration = 35.0;
  double dt = 1.0e-4;
  int output_decimation = 20;
  int rng_seed = 0;  // reserved; the model is deterministic
  HubSide initial_side = HubSide::Bottom;
  bool drag_enabled = true;
  int speed_window = 5;

  bool operator==(const Scenario&) const = default;
};

// Everything a simulation needs; immutable once loaded.
struct ParamSet {
  ActuatorParams actuator;
  EngineParams engine;
  RobotParams robot;
  PowerProtocol power;
  StrokeProfile stroke;
  Scenario scenario;

  bool operator==(const ParamSet&) const = default;
};

struct Violation {
  std::string field;
  std::string rule;
};

// Empty iff every parameter invariant holds.
std::vector<Violation> validate(const ParamSet& params);

std::string format_violations(const std::vector<Violation>& violations);

}  // namespace pulsejet
