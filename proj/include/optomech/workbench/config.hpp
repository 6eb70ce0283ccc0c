#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/frequency_grid.hpp"
#include "optomech/noise_synthesis.hpp"

namespace optomech::workbench {

// Every field is kept in the units of its key so that echoing a loaded file reproduces it exactly.

struct OscillatorSection {
  double mass_kg = 0.0;
  double resonance_frequency_hz = 0.0;
  double quality_factor = 0.0;
  bool operator==(const OscillatorSection &) const = default;
};

struct CavitySection {
  double length_mm = 0.0;
  double input_transmissivity_ppm = 0.0;
  // Exactly one of each pair is set.
  std::optional<double> excess_loss_ppm;
  std::optional<double> finesse;
  std::optional<double> mode_matching;
  std::optional<double> reflection_dip;
  bool operator==(const CavitySection &) const = default;
};

struct LaserSection {
  double wavelength_nm = 1064.0;
  double input_power_mw = 0.0;
  double amplitude_noise_factor = 1.0;
  double frequency_noise_hz2_per_hz = 0.0;
  bool operator==(const LaserSection &) const = default;
};

struct InjectionSection {
  double center_frequency_hz = 0.0;
  double bandwidth_hz = 0.0;
  double level_db = 0.0;
  bool operator==(const InjectionSection &) const = default;
};

struct EnvironmentSection {
  double temperature_k = 0.0;
  std::optional<InjectionSection> injection;
  bool operator==(const EnvironmentSection &) const = default;
};

enum class AngleUnit { degrees, radians };

struct DetectionSection {
  double detection_loss = 0.0;
  double signal_to_lo_power_ratio = 0.01;
  std::vector<double> homodyne_angles;
  AngleUnit angle_unit = AngleUnit::degrees;
  double wideband_displacement_psd_m2_per_hz = 0.0;
  std::optional<double> frequency_noise_displacement_psd_m2_per_hz;
  ShotReference reference = ShotReference::vacuum;
  bool radiation_pressure = true;
  bool operator==(const DetectionSection &) const = default;
};

struct ScenarioConfig {
  std::optional<std::string> preset;
  OscillatorSection oscillator;
  CavitySection cavity;
  LaserSection laser;
  EnvironmentSection environment;
  DetectionSection detection;
  GridSpec grid;

  /// Checks every section; errors name the offending key, e.g. "cavity.finesse: ...".
  void validate() const;

  /// Physical parameter set in SI units; detection.homodyne_angle_rad is the first configured angle.
  SystemParameters system() const;
  std::vector<double> homodyne_angles_rad() const;
  std::vector<double> frequency_grid() const;

  bool operator==(const ScenarioConfig &) const = default;
};

std::vector<std::string_view> preset_names();

/// Throws ValidationError for unknown names.
ScenarioConfig make_preset(std::string_view name);

enum class ConfigFormat { toml, json };

/// Parses TOML or JSON text. A top-level `preset` key supplies every section, and keys given in a
/// section override it one by one. A section may instead name a preset of its own
/// (`preset = "..."`), in which case it must contain no other keys.
ScenarioConfig parse_config(std::string_view text, ConfigFormat format);

/// Format from the extension: .json is JSON, anything else TOML. Throws IoError if unreadable.
ScenarioConfig load_config(const std::filesystem::path &path);

std::string to_toml(const ScenarioConfig &config);
std::string to_json(const ScenarioConfig &config);

/// Dotted parameter paths usable by sweeps, e.g. "laser.input_power_mw".
std::vector<std::string_view> numeric_parameter_paths();
double get_parameter(const ScenarioConfig &config, std::string_view path);
/// Setting one member of an either/or pair (finesse vs excess_loss_ppm, ...) clears the other.
void set_parameter(ScenarioConfig &config, std::string_view path, double value);

} // namespace optomech::workbench
