#pragma once

#include "pulsejet/params.hpp"

namespace pulsejet::sma {

// Lumped state of one SMA coil.
struct SmaState {
  double temperature = 20.0;        // degC
  double austenite_fraction = 0.0;  // xi in [0, 1]
  double displacement = 0.0;        // extension from annealed length [m]
  bool heating_branch = true;

  bool operator==(const SmaState&) const = default;
};

SmaState cold_state(double water_temperature, double displacement = 0.0);

// Advances C dT/dt = P - hA (T - T_water) over dt with the exact exponential
// solution. Only temperature and branch flag change.
SmaState step_temperature(SmaState state, const ActuatorParams& params, double electrical_power,
                          double water_temperature, double dt);

// Cosine transformation law on the requested branch, without memory.
double phase_fraction(double temperature, bool heating_branch, const ActuatorParams& params);

// Applies the branch law with return-point memory: on heating xi never
// decreases, on cooling it never increases. A reversal inside the band
// therefore freezes xi until the new branch curve reaches it.
SmaState update_phase(SmaState state, const ActuatorParams& params);

// Thermal step followed by the phase update.
SmaState step(SmaState state, const ActuatorParams& params, double electrical_power,
              double water_temperature, double dt);

double shear_modulus(double austenite_fraction, const ActuatorParams& params);

// Axial rate of the coil, G d^4 / (8 D^3 n) [N/m].
double spring_rate(double austenite_fraction, const ActuatorParams& params);

// Contractile pull of the coil at its current extension; never negative.
double spring_force(const SmaState& state, const ActuatorParams& params);

// Electrical power delivered to one coil of a powered pair. Limited by what
// the supply voltage can drive through the coil resistance.
double coil_power(const ActuatorParams& params, const PowerProtocol& protocol);

}  // namespace pulsejet::sma
