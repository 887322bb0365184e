#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pulsejet {

// Physical dimension of a configuration value. Every dimensional value is
// stored in SI internally; temperatures are kept in degrees Celsius.
enum class Dimension {
  Dimensionless,
  Length,
  Mass,
  Time,
  Temperature,
  Pressure,
  Resistance,
  HeatCapacity,  // J/K
  Conductance,   // W/K
  Force,
  Damping,       // N*s/m
  Volume,
  Area,
  Density,
  Voltage,
  Current,
  Power,
  Impulse,
  Speed,
};

class UnitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view dimension_name(Dimension d);

// Canonical SI suffix written by the serializer ("m", "kg", "C", ...).
std::string_view si_suffix(Dimension d);

// Parses "0.381 mm", "186 g", "70 C" into SI. Dimensionless values take no
// suffix; dimensional values require one.
double parse_quantity(std::string_view text, Dimension d);

// Formats an SI value with its canonical suffix using round-trip precision.
std::string format_quantity(double value, Dimension d);

// Shortest decimal representation that parses back to the same double.
std::string format_exact(double v);

}  // namespace pulsejet
