#include "pulsejet/units.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>

namespace pulsejet {
namespace {

struct UnitEntry {
  std::string_view suffix;
  double scale;
  double offset = 0.0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <std::size_t N>
using Table = std::array<UnitEntry, N>;

// First entry of each table is the canonical SI suffix.
constexpr Table<6> kLength{{{"m", 1.0}, {"mm", 1e-3}, {"cm", 1e-2}, {"um", 1e-6}, {"µm", 1e-6}, {"km", 1e3}}};
constexpr Table<3> kMass{{{"kg", 1.0}, {"g", 1e-3}, {"mg", 1e-6}}};
constexpr Table<3> kTime{{{"s", 1.0}, {"ms", 1e-3}, {"min", 60.0}}};
constexpr Table<5> kTemperature{{{"C", 1.0}, {"degC", 1.0}, {"°C", 1.0}, {"K", 1.0, -273.15}, {"celsius", 1.0}}};
constexpr Table<4> kPressure{{{"Pa", 1.0}, {"kPa", 1e3}, {"MPa", 1e6}, {"GPa", 1e9}}};
constexpr Table<4> kResistance{{{"Ohm", 1.0}, {"ohm", 1.0}, {"Ω", 1.0}, {"mOhm", 1e-3}}};
constexpr Table<2> kHeatCapacity{{{"J/K", 1.0}, {"mJ/K", 1e-3}}};
constexpr Table<2> kConductance{{{"W/K", 1.0}, {"mW/K", 1e-3}}};
constexpr Table<2> kForce{{{"N", 1.0}, {"mN", 1e-3}}};
constexpr Table<3> kDamping{{{"N*s/m", 1.0}, {"Ns/m", 1.0}, {"N·s/m", 1.0}}};
constexpr Table<9> kVolume{{{"m3", 1.0}, {"m³", 1.0}, {"cm3", 1e-6}, {"cm³", 1e-6}, {"mm3", 1e-9}, {"mm³", 1e-9}, {"L", 1e-3}, {"mL", 1e-6}, {"ml", 1e-6}}};
constexpr Table<6> kArea{{{"m2", 1.0}, {"m²", 1.0}, {"cm2", 1e-4}, {"cm²", 1e-4}, {"mm2", 1e-6}, {"mm²", 1e-6}}};
constexpr Table<3> kDensity{{{"kg/m3", 1.0}, {"kg/m³", 1.0}, {"g/cm3", 1e3}}};
constexpr Table<2> kVoltage{{{"V", 1.0}, {"mV", 1e-3}}};
constexpr Table<2> kCurrent{{{"A", 1.0}, {"mA", 1e-3}}};
constexpr Table<3> kPower{{{"W", 1.0}, {"mW", 1e-3}, {"kW", 1e3}}};
constexpr Table<4> kImpulse{{{"N*s", 1.0}, {"Ns", 1.0}, {"N·s", 1.0}, {"mN*s", 1e-3}}};
constexpr Table<3> kSpeed{{{"m/s", 1.0}, {"mm/s", 1e-3}, {"cm/s", 1e-2}}};

template <std::size_t N>
std::pair<const UnitEntry*, std::size_t> view(const Table<N>& t) {
  return {t.data(), N};
}

std::pair<const UnitEntry*, std::size_t> units_for(Dimension d) {
  switch (d) {
    case Dimension::Dimensionless: return {nullptr, 0};
    case Dimension::Length: return view(kLength);
    case Dimension::Mass: return view(kMass);
    case Dimension::Time: return view(kTime);
    case Dimension::Temperature: return view(kTemperature);
    case Dimension::Pressure: return view(kPressure);
    case Dimension::Resistance: return view(kResistance);
    case Dimension::HeatCapacity: return view(kHeatCapacity);
    case Dimension::Conductance: return view(kConductance);
    case Dimension::Force: return view(kForce);
    case Dimension::Damping: return view(kDamping);
    case Dimension::Volume: return view(kVolume);
    case Dimension::Area: return view(kArea);
    case Dimension::Density: return view(kDensity);
    case Dimension::Voltage: return view(kVoltage);
    case Dimension::Current: return view(kCurrent);
    case Dimension::Power: return view(kPower);
    case Dimension::Impulse: return view(kImpulse);
    case Dimension::Speed: return view(kSpeed);
  }
  return {nullptr, 0};
}

}  // namespace

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::Dimensionless: return "dimensionless";
    case Dimension::Length: return "length";
    case Dimension::Mass: return "mass";
    case Dimension::Time: return "time";
    case Dimension::Temperature: return "temperature";
    case Dimension::Pressure: return "pressure";
    case Dimension::Resistance: return "resistance";
    case Dimension::HeatCapacity: return "heat capacity";
    case Dimension::Conductance: return "thermal conductance";
    case Dimension::Force: return "force";
    case Dimension::Damping: return "damping";
    case Dimension::Volume: return "volume";
    case Dimension::Area: return "area";
    case Dimension::Density: return "density";
    case Dimension::Voltage: return "voltage";
    case Dimension::Current: return "current";
    case Dimension::Power: return "power";
    case Dimension::Impulse: return "impulse";
    case Dimension::Speed: return "speed";
  }
  return "?";
}

std::string_view si_suffix(Dimension d) {
  auto [table, n] = units_for(d);
  return n == 0 ? std::string_view{} : table[0].suffix;
}

double parse_quantity(std::string_view text, Dimension d) {
  text = trim(text);
  double value = 0.0;
  auto first = text.data();
  auto last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{}) {
    throw UnitError("expected a number, got '" + std::string(text) + "'");
  }
  std::string_view suffix = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  auto [table, n] = units_for(d);
  if (n == 0) {
    if (!suffix.empty()) {
      throw UnitError("dimensionless value must not carry a unit suffix ('" + std::string(suffix) + "')");
    }
    return value;
  }
  if (suffix.empty()) {
    throw UnitError("missing unit suffix for " + std::string(dimension_name(d)) + " value '" +
                    std::string(text) + "' (e.g. '" + std::string(table[0].suffix) + "')");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (table[i].suffix != suffix) continue;
    // Decimal prefixes shift the exponent and re-parse, so "2.1 mm" is the
    // same double as 2.1e-3.
    const double lg = std::log10(table[i].scale);
    if (table[i].scale != 1.0 && std::abs(lg - std::round(lg)) < 1e-12) {
      std::string_view number(first, static_cast<std::size_t>(ptr - first));
      long exponent = std::lround(lg);
      if (auto e = number.find_first_of("eE"); e != std::string_view::npos) {
        exponent += std::strtol(std::string(number.substr(e + 1)).c_str(), nullptr, 10);
        number = number.substr(0, e);
      }
      const std::string shifted = std::string(number) + "e" + std::to_string(exponent);
      double v = 0.0;
      std::from_chars(shifted.data(), shifted.data() + shifted.size(), v);
      return v + table[i].offset;
    }
    return value * table[i].scale + table[i].offset;
  }
  throw UnitError("unit '" + std::string(suffix) + "' is not a " + std::string(dimension_name(d)) + " unit");
}

std::string format_exact(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

std::string format_quantity(double value, Dimension d) {
  auto s = format_exact(value);
  auto suffix = si_suffix(d);
  if (suffix.empty()) return s;
  return s + " " + std::string(suffix);
}

}  // namespace pulsejet
