#include "optomech/workbench/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>
#define TOML_EXCEPTIONS 1
#define TOML_ENABLE_FORMATTERS 0
#include <toml.hpp>

#include "optomech/errors.hpp"
#include "optomech/workbench/number_format.hpp"

namespace optomech::workbench {

using nlohmann::json;

namespace {

constexpr double deg_to_rad = constants::pi / 180.0;

// ---- TOML to a JSON tree, so both formats share one loader ----

json to_json_tree(const toml::node &node, const std::string &path) {
  if (const auto *t = node.as_table()) {
    json out = json::object();
    for (const auto &[key, value] : *t) {
      const std::string k(key.str());
      out[k] = to_json_tree(value, path.empty() ? k : path + "." + k);
    }
    return out;
  }
  if (const auto *a = node.as_array()) {
    json out = json::array();
    for (const auto &value : *a) {
      out.push_back(to_json_tree(value, path));
    }
    return out;
  }
  if (const auto *v = node.as_integer()) {
    return json(v->get());
  }
  if (const auto *v = node.as_floating_point()) {
    return json(v->get());
  }
  if (const auto *v = node.as_boolean()) {
    return json(v->get());
  }
  if (const auto *v = node.as_string()) {
    return json(v->get());
  }
  throw ValidationError(path, "unsupported value type (dates and times are not accepted)");
}

// ---- typed readers with field paths in every error ----

double read_number(const json &v, const std::string &path) {
  if (!v.is_number()) {
    throw ValidationError(path, "must be a number");
  }
  return v.get<double>();
}

std::size_t read_count(const json &v, const std::string &path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError(path, "must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string read_string(const json &v, const std::string &path) {
  if (!v.is_string()) {
    throw ValidationError(path, "must be a string");
  }
  return v.get<std::string>();
}

bool read_bool(const json &v, const std::string &path) {
  if (!v.is_boolean()) {
    throw ValidationError(path, "must be true or false");
  }
  return v.get<bool>();
}

std::vector<double> read_numbers(const json &v, const std::string &path) {
  if (!v.is_array()) {
    throw ValidationError(path, "must be an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(read_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

[[noreturn]] void unknown_key(const std::string &section, const std::string &key) {
  throw ValidationError(section + "." + key, "unknown key");
}

void apply_oscillator(OscillatorSection &s, const json &obj) {
  for (const auto &[key, v] : obj.items()) {
    const std::string path = "oscillator." + key;
    if (key == "mass_kg") {
      s.mass_kg = read_number(v, path);
    } else if (key == "resonance_frequency_hz") {
      s.resonance_frequency_hz = read_number(v, path);
    } else if (key == "quality_factor") {
      s.quality_factor = read_number(v, path);
    } else {
      unknown_key("oscillator", key);
    }
  }
}

void apply_cavity(CavitySection &s, const json &obj) {
  if (obj.contains("excess_loss_ppm") && obj.contains("finesse")) {
    throw ValidationError("cavity.finesse", "give either excess_loss_ppm or finesse, not both");
  }
  if (obj.contains("mode_matching") && obj.contains("reflection_dip")) {
    throw ValidationError("cavity.reflection_dip", "give either mode_matching or reflection_dip, not both");
  }
  for (const auto &[key, v] : obj.items()) {
    const std::string path = "cavity." + key;
    if (key == "length_mm") {
      s.length_mm = read_number(v, path);
    } else if (key == "input_transmissivity_ppm") {
      s.input_transmissivity_ppm = read_number(v, path);
    } else if (key == "excess_loss_ppm") {
      s.excess_loss_ppm = read_number(v, path);
      s.finesse.reset();
    } else if (key == "finesse") {
      s.finesse = read_number(v, path);
      s.excess_loss_ppm.reset();
    } else if (key == "mode_matching") {
      s.mode_matching = read_number(v, path);
      s.reflection_dip.reset();
    } else if (key == "reflection_dip") {
      s.reflection_dip = read_number(v, path);
      s.mode_matching.reset();
    } else {
      unknown_key("cavity", key);
    }
  }
}

void apply_laser(LaserSection &s, const json &obj) {
  for (const auto &[key, v] : obj.items()) {
    const std::string path = "laser." + key;
    if (key == "wavelength_nm") {
      s.wavelength_nm = read_number(v, path);
    } else if (key == "input_power_mw") {
      s.input_power_mw = read_number(v, path);
    } else if (key == "amplitude_noise_factor") {
      s.amplitude_noise_factor = read_number(v, path);
    } else if (key == "frequency_noise_hz2_per_hz") {
      s.frequency_noise_hz2_per_hz = read_number(v, path);
    } else {
      unknown_key("laser", key);
    }
  }
}

void apply_injection(InjectionSection &s, const json &obj) {
  if (!obj.is_object()) {
    throw ValidationError("environment.injection", "must be a table");
  }
  for (const auto &[key, v] : obj.items()) {
    const std::string path = "environment.injection." + key;
    if (key == "center_frequency_hz") {
      s.center_frequency_hz = read_number(v, path);
    } else if (key == "bandwidth_hz") {
      s.bandwidth_hz = read_number(v, path);
    } else if (key == "level_db") {
      s.level_db = read_number(v, path);
    } else {
      unknown_key("environment.injection", key);
    }
  }
}

void apply_environment(EnvironmentSection &s, const json &obj) {
  for (const auto &[key, v] : obj.items()) {
    if (key == "temperature_k") {
      s.temperature_k = read_number(v, "environment.temperature_k");
    } else if (key == "injection") {
      if (v.is_boolean() && !v.get<bool>()) {
        s.injection.reset();
        continue;
      }
      InjectionSection inj = s.injection.value_or(InjectionSection{});
      apply_injection(inj, v);
      s.injection = inj;
    } else {
      unknown_key("environment", key);
    }
  }
}

ShotReference parse_reference(const std::string &text) {
  if (text == "vacuum") {
    return ShotReference::vacuum;
  }
  if (text == "decorrelated") {
    return ShotReference::decorrelated;
  }
  throw ValidationError("detection.reference", "must be \"vacuum\" or \"decorrelated\"");
}

void apply_detection(DetectionSection &s, const json &obj) {
  if (obj.contains("homodyne_angles_deg") && obj.contains("homodyne_angles_rad")) {
    throw ValidationError("detection.homodyne_angles_rad", "give homodyne_angles_deg or homodyne_angles_rad, not both");
  }
  for (const auto &[key, v] : obj.items()) {
    const std::string path = "detection." + key;
    if (key == "detection_loss") {
      s.detection_loss = read_number(v, path);
    } else if (key == "signal_to_lo_power_ratio") {
      s.signal_to_lo_power_ratio = read_number(v, path);
    } else if (key == "homodyne_angles_deg") {
      s.homodyne_angles = read_numbers(v, path);
      s.angle_unit = AngleUnit::degrees;
    } else if (key == "homodyne_angles_rad") {
      s.homodyne_angles = read_numbers(v, path);
      s.angle_unit = AngleUnit::radians;
    } else if (key == "wideband_displacement_psd_m2_per_hz") {
      s.wideband_displacement_psd_m2_per_hz = read_number(v, path);
    } else if (key == "frequency_noise_displacement_psd_m2_per_hz") {
      s.frequency_noise_displacement_psd_m2_per_hz = read_number(v, path);
    } else if (key == "reference") {
      s.reference = parse_reference(read_string(v, path));
    } else if (key == "radiation_pressure") {
      s.radiation_pressure = read_bool(v, path);
    } else {
      unknown_key("detection", key);
    }
  }
}

void apply_grid(GridSpec &g, const json &obj) {
  for (const auto &[key, v] : obj.items()) {
    const std::string path = "grid." + key;
    if (key == "start_hz") {
      g.start_hz = read_number(v, path);
    } else if (key == "stop_hz") {
      g.stop_hz = read_number(v, path);
    } else if (key == "log_points") {
      g.log_points = read_count(v, path);
    } else if (key == "refine_linewidths") {
      g.refine_linewidths = read_number(v, path);
    } else if (key == "refine_points") {
      g.refine_points = read_count(v, path);
    } else if (key == "wing_half_width_hz") {
      g.wing_half_width_hz = read_number(v, path);
    } else if (key == "wing_points") {
      g.wing_points = read_count(v, path);
    } else {
      unknown_key("grid", key);
    }
  }
}

ScenarioConfig from_tree(const json &root) {
  if (!root.is_object()) {
    throw ValidationError("config", "top level must be a table");
  }
  ScenarioConfig cfg;
  if (root.contains("preset")) {
    const std::string name = read_string(root["preset"], "preset");
    cfg = make_preset(name);
  }

  using Applier = std::function<void(ScenarioConfig &, const json &)>;
  const std::array<std::pair<std::string_view, Applier>, 6> sections{{
      {"oscillator", [](ScenarioConfig &c, const json &o) { apply_oscillator(c.oscillator, o); }},
      {"cavity", [](ScenarioConfig &c, const json &o) { apply_cavity(c.cavity, o); }},
      {"laser", [](ScenarioConfig &c, const json &o) { apply_laser(c.laser, o); }},
      {"environment", [](ScenarioConfig &c, const json &o) { apply_environment(c.environment, o); }},
      {"detection", [](ScenarioConfig &c, const json &o) { apply_detection(c.detection, o); }},
      {"grid", [](ScenarioConfig &c, const json &o) { apply_grid(c.grid, o); }},
  }};

  for (const auto &[key, value] : root.items()) {
    if (key == "preset") {
      continue;
    }
    const auto it = std::find_if(sections.begin(), sections.end(), [&](const auto &s) { return s.first == key; });
    if (it == sections.end()) {
      throw ValidationError(key, "unknown section");
    }
    if (!value.is_object()) {
      throw ValidationError(key, "must be a table");
    }
    if (value.contains("preset")) {
      if (value.size() != 1) {
        throw ValidationError(key + ".preset", "a section naming a preset cannot also set explicit keys");
      }
      const ScenarioConfig donor = make_preset(read_string(value["preset"], key + ".preset"));
      if (key == "oscillator") cfg.oscillator = donor.oscillator;
      else if (key == "cavity") cfg.cavity = donor.cavity;
      else if (key == "laser") cfg.laser = donor.laser;
      else if (key == "environment") cfg.environment = donor.environment;
      else if (key == "detection") cfg.detection = donor.detection;
      else cfg.grid = donor.grid;
      continue;
    }
    it->second(cfg, value);
  }
  cfg.validate();
  return cfg;
}

// ---- echo ----

std::string toml_number(double v) {
  std::string s = format_double(v);
  if (s.find_first_of(".eEn") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string toml_string(std::string_view s) {
  return json(std::string(s)).dump();
}

std::string toml_array(const std::vector<double> &values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += (i ? ", " : "") + toml_number(values[i]);
  }
  return out + "]";
}

const std::array<std::string_view, 2> preset_list{"paper-classical", "paper-quantum"};

} // namespace

std::vector<std::string_view> preset_names() { return {preset_list.begin(), preset_list.end()}; }

ScenarioConfig make_preset(std::string_view name) {
  ScenarioConfig c;
  c.preset = std::string(name);
  if (name == "paper-classical") {
    c.oscillator = {1.1e-7, 249300.0, 5500.0};
    c.cavity.length_mm = 12.2;
    c.cavity.input_transmissivity_ppm = 110.0;
    c.cavity.finesse = 10000.0;
    c.cavity.reflection_dip = 0.38;
    c.laser = {1064.0, 5.6, 1.0, 0.0};
    c.environment = {300.0, InjectionSection{249300.0, 15000.0, 10.0}};
    c.detection.detection_loss = 0.5;
    c.detection.signal_to_lo_power_ratio = 0.01;
    c.detection.homodyne_angles = {0.0, -20.0, -44.0, -56.0};
    c.detection.angle_unit = AngleUnit::degrees;
    c.detection.wideband_displacement_psd_m2_per_hz = 1e-33;
    c.detection.reference = ShotReference::decorrelated;
    c.grid = {100e3, 600e3, 4001, 20.0, 401, 7500.0, 3001};
    return c;
  }
  if (name == "paper-quantum") {
    c.oscillator = {5e-8, 100e3, 1e5};
    c.cavity.length_mm = 6.0;
    c.cavity.input_transmissivity_ppm = 50.0;
    c.cavity.excess_loss_ppm = 40.0;
    c.cavity.mode_matching = 1.0;
    c.laser = {1064.0, 30.0, 5.0, 1.0};
    c.environment = {4.2, std::nullopt};
    c.detection.detection_loss = 0.1;
    c.detection.signal_to_lo_power_ratio = 0.01;
    c.detection.homodyne_angles = {1e-4};
    c.detection.angle_unit = AngleUnit::radians;
    c.detection.wideband_displacement_psd_m2_per_hz = 0.0;
    c.detection.frequency_noise_displacement_psd_m2_per_hz = 1e-33;
    c.detection.reference = ShotReference::vacuum;
    c.grid = {25e3, 400e3, 4001, 20.0, 401, 3000.0, 6001};
    return c;
  }
  throw ValidationError("preset", "unknown preset \"" + std::string(name) + "\" (known: paper-classical, paper-quantum)");
}

std::vector<double> ScenarioConfig::homodyne_angles_rad() const {
  std::vector<double> out = detection.homodyne_angles;
  if (detection.angle_unit == AngleUnit::degrees) {
    for (double &a : out) {
      a *= deg_to_rad;
    }
  }
  return out;
}

SystemParameters ScenarioConfig::system() const {
  SystemParameters p;
  p.oscillator = {oscillator.mass_kg, constants::two_pi * oscillator.resonance_frequency_hz, oscillator.quality_factor};

  p.cavity.length_m = cavity.length_mm * 1e-3;
  p.cavity.input_transmissivity = cavity.input_transmissivity_ppm * 1e-6;
  if (cavity.excess_loss_ppm) {
    p.cavity.roundtrip_excess_loss = *cavity.excess_loss_ppm * 1e-6;
  } else if (cavity.finesse) {
    try {
      p.cavity.roundtrip_excess_loss = excess_loss_for_finesse(*cavity.finesse, p.cavity.input_transmissivity);
    } catch (const DomainError &e) {
      throw ValidationError("cavity.finesse", e.what());
    }
  } else {
    throw ValidationError("cavity", "one of excess_loss_ppm or finesse is required");
  }
  if (cavity.mode_matching) {
    p.cavity.mode_matching = *cavity.mode_matching;
  } else if (cavity.reflection_dip) {
    try {
      p.cavity.mode_matching = mode_matching_for_dip(*cavity.reflection_dip, p.cavity.input_transmissivity,
                                                     p.cavity.roundtrip_excess_loss);
    } catch (const DomainError &e) {
      throw ValidationError("cavity.reflection_dip", e.what());
    }
  } else {
    throw ValidationError("cavity", "one of mode_matching or reflection_dip is required");
  }

  p.laser = {laser.wavelength_nm * 1e-9, laser.input_power_mw * 1e-3, laser.amplitude_noise_factor,
             laser.frequency_noise_hz2_per_hz};

  p.environment.bath_temperature_k = environment.temperature_k;
  if (environment.injection) {
    p.environment.classical_injection = ClassicalInjection{
        environment.injection->center_frequency_hz, environment.injection->bandwidth_hz, environment.injection->level_db};
  }

  const auto angles = homodyne_angles_rad();
  p.detection = {detection.detection_loss, detection.signal_to_lo_power_ratio, angles.empty() ? 0.0 : angles.front(),
                 detection.wideband_displacement_psd_m2_per_hz};
  p.frequency_noise_displacement_psd = detection.frequency_noise_displacement_psd_m2_per_hz;
  p.reference = detection.reference;
  p.radiation_pressure = detection.radiation_pressure;
  return p;
}

std::vector<double> ScenarioConfig::frequency_grid() const {
  return make_frequency_grid(grid, oscillator.resonance_frequency_hz,
                             oscillator.resonance_frequency_hz / oscillator.quality_factor);
}

void ScenarioConfig::validate() const {
  const auto angles = homodyne_angles_rad();
  const char *angle_key =
      detection.angle_unit == AngleUnit::degrees ? "detection.homodyne_angles_deg" : "detection.homodyne_angles_rad";
  for (double a : angles) {
    if (!(a > -constants::pi / 2 && a <= constants::pi / 2)) {
      throw ValidationError(angle_key, "angles must lie in (-90, 90] degrees");
    }
  }
  const SystemParameters p = system();
  p.validate();
  if (environment.injection) {
    const auto &inj = *p.environment.classical_injection;
    if (!inj.contains(oscillator.resonance_frequency_hz)) {
      throw ValidationError("environment.injection.center_frequency_hz",
                            "injection band must contain the mechanical resonance");
    }
  }
  grid.validate();
  const double f_m = oscillator.resonance_frequency_hz;
  if (grid.start_hz > 0.5 * f_m || grid.stop_hz < 2.0 * f_m) {
    throw ValidationError("grid", "grid must cover [f_M/2, 2 f_M]");
  }
}

ScenarioConfig parse_config(std::string_view text, ConfigFormat format) {
  json tree;
  if (format == ConfigFormat::json) {
    try {
      tree = json::parse(text);
    } catch (const json::parse_error &e) {
      throw ValidationError("config", std::string("JSON syntax error: ") + e.what());
    }
  } else {
    try {
      tree = to_json_tree(toml::parse(text), "");
    } catch (const toml::parse_error &e) {
      std::ostringstream msg;
      msg << "TOML syntax error at line " << e.source().begin.line << ": " << e.description();
      throw ValidationError("config", msg.str());
    }
  }
  return from_tree(tree);
}

ScenarioConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read config file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto format = path.extension() == ".json" ? ConfigFormat::json : ConfigFormat::toml;
  return parse_config(buffer.str(), format);
}

std::string to_toml(const ScenarioConfig &c) {
  std::ostringstream o;
  if (c.preset) {
    o << "preset = " << toml_string(*c.preset) << "\n\n";
  }
  o << "[oscillator]\n"
    << "mass_kg = " << toml_number(c.oscillator.mass_kg) << "\n"
    << "resonance_frequency_hz = " << toml_number(c.oscillator.resonance_frequency_hz) << "\n"
    << "quality_factor = " << toml_number(c.oscillator.quality_factor) << "\n\n";

  o << "[cavity]\n"
    << "length_mm = " << toml_number(c.cavity.length_mm) << "\n"
    << "input_transmissivity_ppm = " << toml_number(c.cavity.input_transmissivity_ppm) << "\n";
  if (c.cavity.excess_loss_ppm) o << "excess_loss_ppm = " << toml_number(*c.cavity.excess_loss_ppm) << "\n";
  if (c.cavity.finesse) o << "finesse = " << toml_number(*c.cavity.finesse) << "\n";
  if (c.cavity.mode_matching) o << "mode_matching = " << toml_number(*c.cavity.mode_matching) << "\n";
  if (c.cavity.reflection_dip) o << "reflection_dip = " << toml_number(*c.cavity.reflection_dip) << "\n";
  o << "\n";

  o << "[laser]\n"
    << "wavelength_nm = " << toml_number(c.laser.wavelength_nm) << "\n"
    << "input_power_mw = " << toml_number(c.laser.input_power_mw) << "\n"
    << "amplitude_noise_factor = " << toml_number(c.laser.amplitude_noise_factor) << "\n"
    << "frequency_noise_hz2_per_hz = " << toml_number(c.laser.frequency_noise_hz2_per_hz) << "\n\n";

  o << "[environment]\n"
    << "temperature_k = " << toml_number(c.environment.temperature_k) << "\n\n";
  if (c.environment.injection) {
    const auto &inj = *c.environment.injection;
    o << "[environment.injection]\n"
      << "center_frequency_hz = " << toml_number(inj.center_frequency_hz) << "\n"
      << "bandwidth_hz = " << toml_number(inj.bandwidth_hz) << "\n"
      << "level_db = " << toml_number(inj.level_db) << "\n\n";
  }

  const auto &d = c.detection;
  o << "[detection]\n"
    << "detection_loss = " << toml_number(d.detection_loss) << "\n"
    << "signal_to_lo_power_ratio = " << toml_number(d.signal_to_lo_power_ratio) << "\n"
    << (d.angle_unit == AngleUnit::degrees ? "homodyne_angles_deg = " : "homodyne_angles_rad = ")
    << toml_array(d.homodyne_angles) << "\n"
    << "wideband_displacement_psd_m2_per_hz = " << toml_number(d.wideband_displacement_psd_m2_per_hz) << "\n";
  if (d.frequency_noise_displacement_psd_m2_per_hz) {
    o << "frequency_noise_displacement_psd_m2_per_hz = " << toml_number(*d.frequency_noise_displacement_psd_m2_per_hz)
      << "\n";
  }
  o << "reference = " << toml_string(to_string(d.reference)) << "\n"
    << "radiation_pressure = " << (d.radiation_pressure ? "true" : "false") << "\n\n";

  o << "[grid]\n"
    << "start_hz = " << toml_number(c.grid.start_hz) << "\n"
    << "stop_hz = " << toml_number(c.grid.stop_hz) << "\n"
    << "log_points = " << c.grid.log_points << "\n"
    << "refine_linewidths = " << toml_number(c.grid.refine_linewidths) << "\n"
    << "refine_points = " << c.grid.refine_points << "\n"
    << "wing_half_width_hz = " << toml_number(c.grid.wing_half_width_hz) << "\n"
    << "wing_points = " << c.grid.wing_points << "\n";
  return o.str();
}

std::string to_json(const ScenarioConfig &c) {
  json root = json::object();
  if (c.preset) {
    root["preset"] = *c.preset;
  }
  root["oscillator"] = {{"mass_kg", c.oscillator.mass_kg},
                        {"resonance_frequency_hz", c.oscillator.resonance_frequency_hz},
                        {"quality_factor", c.oscillator.quality_factor}};
  json cav = {{"length_mm", c.cavity.length_mm}, {"input_transmissivity_ppm", c.cavity.input_transmissivity_ppm}};
  if (c.cavity.excess_loss_ppm) cav["excess_loss_ppm"] = *c.cavity.excess_loss_ppm;
  if (c.cavity.finesse) cav["finesse"] = *c.cavity.finesse;
  if (c.cavity.mode_matching) cav["mode_matching"] = *c.cavity.mode_matching;
  if (c.cavity.reflection_dip) cav["reflection_dip"] = *c.cavity.reflection_dip;
  root["cavity"] = cav;
  root["laser"] = {{"wavelength_nm", c.laser.wavelength_nm},
                   {"input_power_mw", c.laser.input_power_mw},
                   {"amplitude_noise_factor", c.laser.amplitude_noise_factor},
                   {"frequency_noise_hz2_per_hz", c.laser.frequency_noise_hz2_per_hz}};
  json env = {{"temperature_k", c.environment.temperature_k}};
  if (c.environment.injection) {
    env["injection"] = {{"center_frequency_hz", c.environment.injection->center_frequency_hz},
                        {"bandwidth_hz", c.environment.injection->bandwidth_hz},
                        {"level_db", c.environment.injection->level_db}};
  }
  root["environment"] = env;
  const auto &d = c.detection;
  json det = {{"detection_loss", d.detection_loss},
              {"signal_to_lo_power_ratio", d.signal_to_lo_power_ratio},
              {d.angle_unit == AngleUnit::degrees ? "homodyne_angles_deg" : "homodyne_angles_rad", d.homodyne_angles},
              {"wideband_displacement_psd_m2_per_hz", d.wideband_displacement_psd_m2_per_hz},
              {"reference", std::string(to_string(d.reference))},
              {"radiation_pressure", d.radiation_pressure}};
  if (d.frequency_noise_displacement_psd_m2_per_hz) {
    det["frequency_noise_displacement_psd_m2_per_hz"] = *d.frequency_noise_displacement_psd_m2_per_hz;
  }
  root["detection"] = det;
  root["grid"] = {{"start_hz", c.grid.start_hz},
                  {"stop_hz", c.grid.stop_hz},
                  {"log_points", c.grid.log_points},
                  {"refine_linewidths", c.grid.refine_linewidths},
                  {"refine_points", c.grid.refine_points},
                  {"wing_half_width_hz", c.grid.wing_half_width_hz},
                  {"wing_points", c.grid.wing_points}};
  return root.dump(2) + "\n";
}

// ---- dotted parameter access ----

namespace {

struct ParameterSlot {
  std::string_view path;
  std::function<double(const ScenarioConfig &)> get;
  std::function<void(ScenarioConfig &, double)> set;
};

template <typename Section, typename Member>
ParameterSlot plain(std::string_view path, Section ScenarioConfig::*section, Member Section::*member) {
  return {path, [=](const ScenarioConfig &c) { return static_cast<double>(c.*section.*member); },
          [=](ScenarioConfig &c, double v) { c.*section.*member = v; }};
}

ParameterSlot either(std::string_view path, std::optional<double> CavitySection::*member,
                     std::optional<double> CavitySection::*partner) {
  return {path,
          [=](const ScenarioConfig &c) {
            if (!(c.cavity.*member)) {
              throw ValidationError(std::string(path), "not set in this configuration");
            }
            return *(c.cavity.*member);
          },
          [=](ScenarioConfig &c, double v) {
            c.cavity.*member = v;
            (c.cavity.*partner).reset();
          }};
}

ParameterSlot injection(std::string_view path, double InjectionSection::*member) {
  return {path,
          [=](const ScenarioConfig &c) {
            if (!c.environment.injection) {
              throw ValidationError(std::string(path), "no injection configured");
            }
            return (*c.environment.injection).*member;
          },
          [=](ScenarioConfig &c, double v) {
            if (!c.environment.injection) {
              throw ValidationError(std::string(path), "no injection configured");
            }
            (*c.environment.injection).*member = v;
          }};
}

ParameterSlot single_angle(std::string_view path, AngleUnit unit) {
  return {path,
          [=](const ScenarioConfig &c) {
            if (c.detection.homodyne_angles.empty()) {
              throw ValidationError(std::string(path), "no homodyne angle configured");
            }
            const double rad = c.homodyne_angles_rad().front();
            return unit == AngleUnit::radians ? rad : rad / deg_to_rad;
          },
          [=](ScenarioConfig &c, double v) {
            c.detection.homodyne_angles = {v};
            c.detection.angle_unit = unit;
          }};
}

const std::vector<ParameterSlot> &parameter_slots() {
  static const std::vector<ParameterSlot> slots = [] {
    std::vector<ParameterSlot> s;
    s.push_back(plain("oscillator.mass_kg", &ScenarioConfig::oscillator, &OscillatorSection::mass_kg));
    s.push_back(plain("oscillator.resonance_frequency_hz", &ScenarioConfig::oscillator,
                      &OscillatorSection::resonance_frequency_hz));
    s.push_back(plain("oscillator.quality_factor", &ScenarioConfig::oscillator, &OscillatorSection::quality_factor));
    s.push_back(plain("cavity.length_mm", &ScenarioConfig::cavity, &CavitySection::length_mm));
    s.push_back(plain("cavity.input_transmissivity_ppm", &ScenarioConfig::cavity,
                      &CavitySection::input_transmissivity_ppm));
    s.push_back(either("cavity.excess_loss_ppm", &CavitySection::excess_loss_ppm, &CavitySection::finesse));
    s.push_back(either("cavity.finesse", &CavitySection::finesse, &CavitySection::excess_loss_ppm));
    s.push_back(either("cavity.mode_matching", &CavitySection::mode_matching, &CavitySection::reflection_dip));
    s.push_back(either("cavity.reflection_dip", &CavitySection::reflection_dip, &CavitySection::mode_matching));
    s.push_back(plain("laser.wavelength_nm", &ScenarioConfig::laser, &LaserSection::wavelength_nm));
    s.push_back(plain("laser.input_power_mw", &ScenarioConfig::laser, &LaserSection::input_power_mw));
    s.push_back(plain("laser.amplitude_noise_factor", &ScenarioConfig::laser, &LaserSection::amplitude_noise_factor));
    s.push_back(plain("laser.frequency_noise_hz2_per_hz", &ScenarioConfig::laser,
                      &LaserSection::frequency_noise_hz2_per_hz));
    s.push_back(plain("environment.temperature_k", &ScenarioConfig::environment, &EnvironmentSection::temperature_k));
    s.push_back(injection("environment.injection.center_frequency_hz", &InjectionSection::center_frequency_hz));
    s.push_back(injection("environment.injection.bandwidth_hz", &InjectionSection::bandwidth_hz));
    s.push_back(injection("environment.injection.level_db", &InjectionSection::level_db));
    s.push_back(plain("detection.detection_loss", &ScenarioConfig::detection, &DetectionSection::detection_loss));
    s.push_back(plain("detection.signal_to_lo_power_ratio", &ScenarioConfig::detection,
                      &DetectionSection::signal_to_lo_power_ratio));
    s.push_back(plain("detection.wideband_displacement_psd_m2_per_hz", &ScenarioConfig::detection,
                      &DetectionSection::wideband_displacement_psd_m2_per_hz));
    s.push_back({"detection.frequency_noise_displacement_psd_m2_per_hz",
                 [](const ScenarioConfig &c) {
                   return c.detection.frequency_noise_displacement_psd_m2_per_hz
                       ? *c.detection.frequency_noise_displacement_psd_m2_per_hz
                       : c.system().frequency_noise_displacement();
                 },
                 [](ScenarioConfig &c, double v) { c.detection.frequency_noise_displacement_psd_m2_per_hz = v; }});
    s.push_back(single_angle("detection.homodyne_angle_deg", AngleUnit::degrees));
    s.push_back(single_angle("detection.homodyne_angle_rad", AngleUnit::radians));
    return s;
  }();
  return slots;
}

const ParameterSlot &find_slot(std::string_view path) {
  const auto &slots = parameter_slots();
  const auto it = std::find_if(slots.begin(), slots.end(), [&](const ParameterSlot &s) { return s.path == path; });
  if (it == slots.end()) {
    throw ValidationError(std::string(path), "not a numeric parameter path");
  }
  return *it;
}

} // namespace

std::vector<std::string_view> numeric_parameter_paths() {
  std::vector<std::string_view> out;
  for (const auto &s : parameter_slots()) {
    out.push_back(s.path);
  }
  return out;
}

double get_parameter(const ScenarioConfig &config, std::string_view path) { return find_slot(path).get(config); }

void set_parameter(ScenarioConfig &config, std::string_view path, double value) {
  find_slot(path).set(config, value);
}

} // namespace optomech::workbench
