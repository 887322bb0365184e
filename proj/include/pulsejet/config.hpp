#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pulsejet/params.hpp"
#include "pulsejet/units.hpp"

namespace pulsejet {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string field = {}, int line = 0);

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

// Raised when a parsed document yields parameters that break an invariant.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

enum class FieldKind { Real, Integer, Boolean, Choice };

// One addressable configuration entry, e.g. "actuator.wire_diameter".
struct FieldInfo {
  std::string path;
  Dimension dimension = Dimension::Dimensionless;
  FieldKind kind = FieldKind::Real;
  std::vector<std::string> choices;  // FieldKind::Choice only; index is the value
  std::function<double&(ParamSet&)> ref_real;
  std::function<int&(ParamSet&)> ref_int;
  std::function<bool&(ParamSet&)> ref_bool;
  std::function<int(const ParamSet&)> get_choice;
  std::function<void(ParamSet&, int)> set_choice;

  double get(const ParamSet& p) const;
  void set(ParamSet& p, double v) const;
  std::string section() const;
  std::string key() const;
};

const std::vector<FieldInfo>& config_fields();

// Throws ConfigError naming the path when it does not resolve.
const FieldInfo& find_field(std::string_view path);

double get_param(const ParamSet& p, std::string_view path);
void set_param(ParamSet& p, std::string_view path, double value);

// Flat "section.key" -> (raw text, line) view of a parsed document.
struct RawEntry {
  std::string text;
  int line = 0;
};
using RawDocument = std::map<std::string, RawEntry>;

// Canonical text ("[section]" headers, "key = value" lines, '#' comments)
// or JSON (a document whose first character is '{').
RawDocument parse_document(std::string_view text);

// Applies a document on top of `base`. Every field absent from the document
// keeps its value from `base`. Validates the result unless told otherwise.
ParamSet load_config(std::string_view text, const ParamSet& base = ParamSet{}, bool check = true);
ParamSet load_config_file(const std::filesystem::path& path, const ParamSet& base = ParamSet{},
                          bool check = true);

std::string read_text_file(const std::filesystem::path& path);

// Canonical text with every field in SI and round-trip precision.
std::string serialize(const ParamSet& p);
std::string serialize_json(const ParamSet& p);

// Text document holding only the listed paths.
std::string serialize_overlay(const ParamSet& p, const std::vector<std::string>& paths);

// FNV-1a over the canonical serialization, as 16 hex digits.
std::string config_hash(const ParamSet& p);

}  // namespace pulsejet
