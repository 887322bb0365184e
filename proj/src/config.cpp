#include "pulsejet/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pulsejet {

ConfigError::ConfigError(const std::string& message, std::string field, int line)
    : std::runtime_error([&] {
        std::string s;
        if (line > 0) s += "line " + std::to_string(line) + ": ";
        if (!field.empty()) s += field + ": ";
        return s + message;
      }()),
      field_(std::move(field)),
      line_(line) {}

InvariantError::InvariantError(std::vector<Violation> violations)
    : std::runtime_error("invariant violation: " + format_violations(violations)),
      violations_(std::move(violations)) {}

double FieldInfo::get(const ParamSet& p) const {
  auto& m = const_cast<ParamSet&>(p);
  switch (kind) {
    case FieldKind::Real: return ref_real(m);
    case FieldKind::Integer: return ref_int(m);
    case FieldKind::Boolean: return ref_bool(m) ? 1.0 : 0.0;
    case FieldKind::Choice: return get_choice(p);
  }
  return 0.0;
}

void FieldInfo::set(ParamSet& p, double v) const {
  switch (kind) {
    case FieldKind::Real: ref_real(p) = v; break;
    case FieldKind::Integer: ref_int(p) = static_cast<int>(std::lround(v)); break;
    case FieldKind::Boolean: ref_bool(p) = v != 0.0; break;
    case FieldKind::Choice: set_choice(p, static_cast<int>(std::lround(v))); break;
  }
}

std::string FieldInfo::section() const { return path.substr(0, path.find('.')); }
std::string FieldInfo::key() const { return path.substr(path.find('.') + 1); }

namespace {

FieldInfo real(std::string path, Dimension d, std::function<double&(ParamSet&)> ref) {
  FieldInfo f;
  f.path = std::move(path);
  f.dimension = d;
  f.kind = FieldKind::Real;
  f.ref_real = std::move(ref);
  return f;
}

FieldInfo integer(std::string path, std::function<int&(ParamSet&)> ref) {
  FieldInfo f;
  f.path = std::move(path);
  f.kind = FieldKind::Integer;
  f.ref_int = std::move(ref);
  return f;
}

FieldInfo boolean(std::string path, std::function<bool&(ParamSet&)> ref) {
  FieldInfo f;
  f.path = std::move(path);
  f.kind = FieldKind::Boolean;
  f.ref_bool = std::move(ref);
  return f;
}

std::vector<FieldInfo> build_fields() {
  using D = Dimension;
  std::vector<FieldInfo> f;
  // [actuator]
  f.push_back(real("actuator.wire_diameter", D::Length, [](ParamSet& p) -> double& { return p.actuator.wire_diameter; }));
  f.push_back(real("actuator.coil_diameter", D::Length, [](ParamSet& p) -> double& { return p.actuator.coil_diameter; }));
  f.push_back(real("actuator.coil_length", D::Length, [](ParamSet& p) -> double& { return p.actuator.coil_length; }));
  f.push_back(real("actuator.max_stroke", D::Length, [](ParamSet& p) -> double& { return p.actuator.max_stroke; }));
  f.push_back(real("actuator.pitch", D::Length, [](ParamSet& p) -> double& { return p.actuator.pitch; }));
  f.push_back(integer("actuator.active_turns", [](ParamSet& p) -> int& { return p.actuator.active_turns; }));
  f.push_back(real("actuator.shear_modulus_martensite", D::Pressure, [](ParamSet& p) -> double& { return p.actuator.shear_modulus_martensite; }));
  f.push_back(real("actuator.shear_modulus_austenite", D::Pressure, [](ParamSet& p) -> double& { return p.actuator.shear_modulus_austenite; }));
  f.push_back(real("actuator.austenite_start", D::Temperature, [](ParamSet& p) -> double& { return p.actuator.transition_temps.austenite_start; }));
  f.push_back(real("actuator.austenite_finish", D::Temperature, [](ParamSet& p) -> double& { return p.actuator.transition_temps.austenite_finish; }));
  f.push_back(real("actuator.martensite_start", D::Temperature, [](ParamSet& p) -> double& { return p.actuator.transition_temps.martensite_start; }));
  f.push_back(real("actuator.martensite_finish", D::Temperature, [](ParamSet& p) -> double& { return p.actuator.transition_temps.martensite_finish; }));
  f.push_back(real("actuator.electrical_resistance", D::Resistance, [](ParamSet& p) -> double& { return p.actuator.electrical_resistance; }));
  f.push_back(real("actuator.thermal_capacitance", D::HeatCapacity, [](ParamSet& p) -> double& { return p.actuator.thermal_capacitance; }));
  f.push_back(real("actuator.convective_coefficient_area_product", D::Conductance, [](ParamSet& p) -> double& { return p.actuator.convective_coefficient_area_product; }));
  f.push_back(real("actuator.pre_stretch", D::Length, [](ParamSet& p) -> double& { return p.actuator.pre_stretch; }));
  // [engine]
  f.push_back(real("engine.hub_travel", D::Length, [](ParamSet& p) -> double& { return p.engine.hub_travel; }));
  f.push_back(real("engine.hub_moving_mass", D::Mass, [](ParamSet& p) -> double& { return p.engine.hub_moving_mass; }));
  f.push_back(real("engine.hub_damping", D::Damping, [](ParamSet& p) -> double& { return p.engine.hub_damping; }));
  f.push_back(real("engine.barrier_peak_force", D::Force, [](ParamSet& p) -> double& { return p.engine.barrier_peak_force; }));
  f.push_back(real("engine.stop_restitution", D::Dimensionless, [](ParamSet& p) -> double& { return p.engine.stop_restitution; }));
  f.push_back(real("engine.barrier_bias_force", D::Force, [](ParamSet& p) -> double& { return p.engine.barrier_bias_force; }));
  // [robot]
  f.push_back(real("robot.total_mass", D::Mass, [](ParamSet& p) -> double& { return p.robot.total_mass; }));
  f.push_back(real("robot.bell_mass", D::Mass, [](ParamSet& p) -> double& { return p.robot.bell_mass; }));
  f.push_back(real("robot.body_length", D::Length, [](ParamSet& p) -> double& { return p.robot.body_length; }));
  f.push_back(real("robot.body_diameter", D::Length, [](ParamSet& p) -> double& { return p.robot.body_diameter; }));
  f.push_back(real("robot.bell_volume_rest", D::Volume, [](ParamSet& p) -> double& { return p.robot.bell_volume_rest; }));
  f.push_back(real("robot.bell_stiffness_peak_force", D::Force, [](ParamSet& p) -> double& { return p.robot.bell_stiffness_peak_force; }));
  f.push_back(real("robot.jet_orifice_area", D::Area, [](ParamSet& p) -> double& { return p.robot.jet_orifice_area; }));
  f.push_back(real("robot.drag_coefficient", D::Dimensionless, [](ParamSet& p) -> double& { return p.robot.drag_coefficient; }));
  f.push_back(real("robot.added_mass_coefficient", D::Dimensionless, [](ParamSet& p) -> double& { return p.robot.added_mass_coefficient; }));
  f.push_back(real("robot.frontal_area", D::Area, [](ParamSet& p) -> double& { return p.robot.frontal_area; }));
  f.push_back(real("robot.water_density", D::Density, [](ParamSet& p) -> double& { return p.robot.water_density; }));
  f.push_back(real("robot.water_temperature", D::Temperature, [](ParamSet& p) -> double& { return p.robot.water_temperature; }));
  f.push_back(real("robot.intake_thrust_factor", D::Dimensionless, [](ParamSet& p) -> double& { return p.robot.intake_thrust_factor; }));
  f.push_back(real("robot.linkage_ratio", D::Dimensionless, [](ParamSet& p) -> double& { return p.robot.linkage_ratio; }));
  // [power]
  f.push_back(real("power.supply_voltage", D::Voltage, [](ParamSet& p) -> double& { return p.power.supply_voltage; }));
  f.push_back(real("power.supply_current", D::Current, [](ParamSet& p) -> double& { return p.power.supply_current; }));
  f.push_back(real("power.on_duration", D::Time, [](ParamSet& p) -> double& { return p.power.on_duration; }));
  f.push_back(real("power.cycle_period", D::Time, [](ParamSet& p) -> double& { return p.power.cycle_period; }));
  f.push_back(real("power.pair_split_fraction", D::Dimensionless, [](ParamSet& p) -> double& { return p.power.pair_split_fraction; }));
  f.push_back(boolean("power.snap_cutoff", [](ParamSet& p) -> bool& { return p.power.snap_cutoff; }));
  // [stroke]
  f.push_back(real("stroke.delta_volume", D::Volume, [](ParamSet& p) -> double& { return p.stroke.delta_volume; }));
  f.push_back(real("stroke.expansion_duration", D::Time, [](ParamSet& p) -> double& { return p.stroke.expansion_duration; }));
  f.push_back(real("stroke.contraction_duration", D::Time, [](ParamSet& p) -> double& { return p.stroke.contraction_duration; }));
  // [scenario]
  {
    FieldInfo k;
    k.path = "scenario.kind";
    k.kind = FieldKind::Choice;
    k.choices = {"free-swim", "fixed-mount"};
    k.get_choice = [](const ParamSet& p) { return static_cast<int>(p.scenario.kind); };
    k.set_choice = [](ParamSet& p, int v) { p.scenario.kind = static_cast<ScenarioKind>(v); };
    f.push_back(std::move(k));
  }
  f.push_back(integer("scenario.n_cycles", [](ParamSet& p) -> int& { return p.scenario.n_cycles; }));
  f.push_back(real("scenario.duration", D::Time, [](ParamSet& p) -> double& { return p.scenario.duration; }));
  f.push_back(real("scenario.dt", D::Time, [](ParamSet& p) -> double& { return p.scenario.dt; }));
  f.push_back(integer("scenario.output_decimation", [](ParamSet& p) -> int& { return p.scenario.output_decimation; }));
  f.push_back(integer("scenario.rng_seed", [](ParamSet& p) -> int& { return p.scenario.rng_seed; }));
  {
    FieldInfo k;
    k.path = "scenario.initial_side";
    k.kind = FieldKind::Choice;
    k.choices = {"bottom", "top"};
    k.get_choice = [](const ParamSet& p) { return static_cast<int>(p.scenario.initial_side); };
    k.set_choice = [](ParamSet& p, int v) { p.scenario.initial_side = static_cast<HubSide>(v); };
    f.push_back(std::move(k));
  }
  f.push_back(boolean("scenario.drag_enabled", [](ParamSet& p) -> bool& { return p.scenario.drag_enabled; }));
  f.push_back(integer("scenario.speed_window", [](ParamSet& p) -> int& { return p.scenario.speed_window; }));
  return f;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view v, int line) {
  if (!v.empty() && (v.front() == '"' || v.front() == '\'')) {
    if (v.size() < 2 || v.back() != v.front()) throw ConfigError("unterminated string", {}, line);
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

RawDocument parse_text(std::string_view text) {
  RawDocument doc;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", {}, line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name", {}, line_no);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", {}, line_no);
    auto key = std::string(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", {}, line_no);
    if (value.empty()) throw ConfigError("missing value", key, line_no);
    auto full = section.empty() ? key : section + "." + key;
    if (doc.count(full)) throw ConfigError("duplicate key", full, line_no);
    doc[full] = RawEntry{unquote(value, line_no), line_no};
  }
  return doc;
}

void flatten_json(const nlohmann::json& j, const std::string& prefix, RawDocument& doc) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto path = prefix.empty() ? it.key() : prefix + "." + it.key();
    const auto& v = it.value();
    if (v.is_object()) {
      flatten_json(v, path, doc);
    } else if (v.is_string()) {
      doc[path] = RawEntry{v.get<std::string>(), 0};
    } else if (v.is_boolean()) {
      doc[path] = RawEntry{v.get<bool>() ? "true" : "false", 0};
    } else if (v.is_number_integer()) {
      doc[path] = RawEntry{std::to_string(v.get<long long>()), 0};
    } else if (v.is_number()) {
      doc[path] = RawEntry{format_exact(v.get<double>()), 0};
    } else {
      throw ConfigError("unsupported JSON value type", path);
    }
  }
}

double parse_integer(const std::string& text, const std::string& path, int line) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(text, &used);
    if (trim(std::string_view(text).substr(used)).size() != 0) throw std::invalid_argument("trailing");
    return static_cast<double>(v);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + text + "'", path, line);
  }
}

std::string format_value(const FieldInfo& f, const ParamSet& p) {
  switch (f.kind) {
    case FieldKind::Real: {
      auto s = format_quantity(f.get(p), f.dimension);
      return f.dimension == Dimension::Dimensionless ? s : "\"" + s + "\"";
    }
    case FieldKind::Integer: return std::to_string(static_cast<long long>(f.get(p)));
    case FieldKind::Boolean: return f.get(p) != 0.0 ? "true" : "false";
    case FieldKind::Choice: return "\"" + f.choices.at(static_cast<std::size_t>(f.get(p))) + "\"";
  }
  return {};
}

}  // namespace

const std::vector<FieldInfo>& config_fields() {
  static const std::vector<FieldInfo> fields = build_fields();
  return fields;
}

const FieldInfo& find_field(std::string_view path) {
  for (const auto& f : config_fields()) {
    if (f.path == path) return f;
  }
  throw ConfigError("unknown parameter path", std::string(path));
}

double get_param(const ParamSet& p, std::string_view path) { return find_field(path).get(p); }
void set_param(ParamSet& p, std::string_view path, double value) { find_field(path).set(p, value); }

RawDocument parse_document(std::string_view text) {
  auto body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    RawDocument doc;
    flatten_json(j, "", doc);
    return doc;
  }
  return parse_text(text);
}

ParamSet load_config(std::string_view text, const ParamSet& base, bool check) {
  ParamSet p = base;
  for (const auto& [path, entry] : parse_document(text)) {
    const FieldInfo* field = nullptr;
    for (const auto& f : config_fields()) {
      if (f.path == path) field = &f;
    }
    if (!field) throw ConfigError("unknown key", path, entry.line);
    switch (field->kind) {
      case FieldKind::Real:
        try {
          field->set(p, parse_quantity(entry.text, field->dimension));
        } catch (const UnitError& e) {
          throw ConfigError(e.what(), path, entry.line);
        }
        break;
      case FieldKind::Integer: field->set(p, parse_integer(entry.text, path, entry.line)); break;
      case FieldKind::Boolean:
        if (entry.text == "true") field->set(p, 1.0);
        else if (entry.text == "false") field->set(p, 0.0);
        else throw ConfigError("expected true or false, got '" + entry.text + "'", path, entry.line);
        break;
      case FieldKind::Choice: {
        auto it = std::find(field->choices.begin(), field->choices.end(), entry.text);
        if (it == field->choices.end()) {
          std::string allowed;
          for (const auto& c : field->choices) allowed += (allowed.empty() ? "" : ", ") + c;
          throw ConfigError("expected one of {" + allowed + "}, got '" + entry.text + "'", path, entry.line);
        }
        field->set(p, static_cast<double>(it - field->choices.begin()));
        break;
      }
    }
  }
  if (check) {
    auto violations = validate(p);
    if (!violations.empty()) throw InvariantError(std::move(violations));
  }
  return p;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParamSet load_config_file(const std::filesystem::path& path, const ParamSet& base, bool check) {
  return load_config(read_text_file(path), base, check);
}

std::string serialize(const ParamSet& p) {
  std::string out;
  std::string section;
  for (const auto& f : config_fields()) {
    if (f.section() != section) {
      section = f.section();
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += f.key() + " = " + format_value(f, p) + "\n";
  }
  return out;
}

std::string serialize_json(const ParamSet& p) {
  nlohmann::ordered_json j;
  for (const auto& f : config_fields()) {
    auto& slot = j[f.section()][f.key()];
    switch (f.kind) {
      case FieldKind::Real:
        if (f.dimension == Dimension::Dimensionless) slot = f.get(p);
        else slot = format_quantity(f.get(p), f.dimension);
        break;
      case FieldKind::Integer: slot = static_cast<long long>(f.get(p)); break;
      case FieldKind::Boolean: slot = f.get(p) != 0.0; break;
      case FieldKind::Choice: slot = f.choices.at(static_cast<std::size_t>(f.get(p))); break;
    }
  }
  return j.dump(2) + "\n";
}

std::string serialize_overlay(const ParamSet& p, const std::vector<std::string>& paths) {
  std::map<std::string, std::vector<const FieldInfo*>> by_section;
  for (const auto& path : paths) {
    const auto& f = find_field(path);
    by_section[f.section()].push_back(&f);
  }
  std::string out;
  for (const auto& [section, fields] : by_section) {
    out += (out.empty() ? "[" : "\n[") + section + "]\n";
    for (const auto* f : fields) out += f->key() + " = " + format_value(*f, p) + "\n";
  }
  return out;
}

std::string config_hash(const ParamSet& p) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : serialize(p)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pulsejet
