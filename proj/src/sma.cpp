#include "pulsejet/sma.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pulsejet::sma {

SmaState cold_state(double water_temperature, double displacement) {
  SmaState s;
  s.temperature = water_temperature;
  s.austenite_fraction = 0.0;
  s.displacement = displacement;
  s.heating_branch = true;
  return s;
}

SmaState step_temperature(SmaState state, const ActuatorParams& params, double electrical_power,
                          double water_temperature, double dt) {
  const double ha = params.convective_coefficient_area_product;
  const double steady = water_temperature + electrical_power / ha;
  const double decay = std::exp(-dt * ha / params.thermal_capacitance);
  const double next = steady + (state.temperature - steady) * decay;
  if (next > state.temperature) state.heating_branch = true;
  else if (next < state.temperature) state.heating_branch = false;
  state.temperature = next;
  return state;
}

double phase_fraction(double temperature, bool heating_branch, const ActuatorParams& params) {
  const auto& t = params.transition_temps;
  const double lo = heating_branch ? t.austenite_start : t.martensite_finish;
  const double hi = heating_branch ? t.austenite_finish : t.martensite_start;
  if (temperature <= lo) return 0.0;
  if (temperature >= hi) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * (temperature - lo) / (hi - lo)));
}

SmaState update_phase(SmaState state, const ActuatorParams& params) {
  const double law = phase_fraction(state.temperature, state.heating_branch, params);
  state.austenite_fraction = state.heating_branch ? std::max(state.austenite_fraction, law)
                                                  : std::min(state.austenite_fraction, law);
  return state;
}

SmaState step(SmaState state, const ActuatorParams& params, double electrical_power,
              double water_temperature, double dt) {
  return update_phase(step_temperature(state, params, electrical_power, water_temperature, dt), params);
}

double shear_modulus(double austenite_fraction, const ActuatorParams& params) {
  return params.shear_modulus_martensite +
         austenite_fraction * (params.shear_modulus_austenite - params.shear_modulus_martensite);
}

double spring_rate(double austenite_fraction, const ActuatorParams& params) {
  const double d = params.wire_diameter;
  const double D = params.coil_diameter;
  return shear_modulus(austenite_fraction, params) * d * d * d * d /
         (8.0 * D * D * D * static_cast<double>(params.active_turns));
}

double spring_force(const SmaState& state, const ActuatorParams& params) {
  return std::max(0.0, spring_rate(state.austenite_fraction, params) * state.displacement);
}

double coil_power(const ActuatorParams& params, const PowerProtocol& protocol) {
  const double share = protocol.supply_voltage * protocol.supply_current * protocol.pair_split_fraction;
  const double ohmic = protocol.supply_voltage * protocol.supply_voltage / params.electrical_resistance;
  return std::min(share, ohmic);
}

}  // namespace pulsejet::sma
