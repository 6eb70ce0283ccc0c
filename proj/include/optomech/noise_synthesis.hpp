#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "optomech/cavity_optics.hpp"
#include "optomech/core_model.hpp"

namespace optomech {

enum class NoiseSource {
  shot,
  backaction,
  thermal,
  laser_amplitude,
  laser_frequency,
  loss_vacuum,
  bs_vacuum,
  injected_classical,
  wideband_displacement,
};

inline constexpr std::size_t noise_source_count = 9;

inline constexpr std::array<NoiseSource, noise_source_count> all_noise_sources{
    NoiseSource::shot,           NoiseSource::backaction,      NoiseSource::thermal,
    NoiseSource::laser_amplitude, NoiseSource::laser_frequency, NoiseSource::loss_vacuum,
    NoiseSource::bs_vacuum,      NoiseSource::injected_classical, NoiseSource::wideband_displacement,
};

std::string_view to_string(NoiseSource source);

/// What "0 dB" means for relative spectra.
///   vacuum:       coherent-state vacuum level (quantum budget).
///   decorrelated: cos²φ·S11 + sin²φ, the level the same beam would show at this angle if the
///                 amplitude and phase quadratures were uncorrelated (classical analog, where the
///                 laser amplitude noise stands in for shot noise).
enum class ShotReference { vacuum, decorrelated };

std::string_view to_string(ShotReference reference);

struct DetectionChain {
  double detection_loss = 0.0;             // propagation + quantum efficiency + signal attenuation
  double signal_to_lo_power_ratio = 0.01;  // recorded only; the LO is treated as strong
  double homodyne_angle_rad = 0.0;
  double wideband_displacement_noise_psd = 0.0; // m²/Hz, one-sided

  void validate() const;

  bool operator==(const DetectionChain &) const = default;
};

struct SystemParameters {
  MechanicalOscillator oscillator;
  NoiseEnvironment environment;
  OpticalCavity cavity;
  LaserDrive laser;
  DetectionChain detection;
  // Displacement-equivalent laser frequency noise, m²/Hz. Unset means (L/ν_L)²·S_ν.
  std::optional<double> frequency_noise_displacement_psd;
  ShotReference reference = ShotReference::vacuum;
  // Off: the mirror feels no radiation-pressure force (amplitude noise stays in the amplitude quadrature).
  bool radiation_pressure = true;

  double frequency_noise_displacement() const;
  void validate() const;
};

/// Top-hat force PSD, N²/Hz one-sided.
struct InjectedForcePsd {
  double low_edge_hz = 0.0;
  double high_edge_hz = 0.0;
  double level = 0.0;

  double operator()(double frequency_hz) const {
    return (frequency_hz >= low_edge_hz && frequency_hz <= high_edge_hz) ? level : 0.0;
  }
};

/// Level = thermal_force_psd × 10^(dB/10). Throws DomainError when nothing is injected or the band
/// misses the mechanical resonance.
InjectedForcePsd inject_classical_noise(const NoiseEnvironment &env, const MechanicalOscillator &osc);

/// Quadrature covariance of the detected reflected field at angular frequency omega (> 0), in
/// vacuum units.
QuadraturePair build_quadrature_pair(const SystemParameters &params, double omega);

struct QuadratureSpectrum {
  std::vector<double> frequency_hz;
  std::array<std::vector<double>, noise_source_count> per_source; // vacuum units, indexed by NoiseSource
  std::vector<double> total;     // vacuum units
  std::vector<double> reference; // 0 dB level, vacuum units
  double homodyne_angle_rad = 0.0;

  const std::vector<double> &source(NoiseSource s) const { return per_source[static_cast<std::size_t>(s)]; }
  double relative_total(std::size_t i) const { return total[i] / reference[i]; }
};

/// Evaluates the detected spectrum at homodyne angle phi (overrides params.detection.homodyne_angle_rad).
/// `total` is mixed from the quadrature pair; the per-source arrays are an independent decomposition that
/// sums to it. Only the backaction entry may be negative: it holds the amplitude-phase correlation.
QuadratureSpectrum synthesize_spectrum(const SystemParameters &params, std::span<const double> frequency_hz,
                                       double phi);

enum class ResonanceSide { below_resonance, above_resonance };

std::string_view to_string(ResonanceSide side);

struct SqueezingReport {
  double min_relative_psd_db = 0.0;
  double at_frequency_hz = 0.0;
  ResonanceSide side = ResonanceSide::below_resonance;
  double max_relative_psd_db = 0.0;
  double at_max_frequency_hz = 0.0;
};

/// Extremes of total/reference. Throws DomainError unless the grid covers [f_M/2, 2·f_M].
SqueezingReport squeezing_metrics(const QuadratureSpectrum &spectrum, double resonance_hz);

/// Displacement noise seen by the PDH readout: thermal + |χ|²·injected force + wideband floor, m²/Hz.
std::vector<double> displacement_spectrum(const SystemParameters &params, std::span<const double> frequency_hz);

inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }

} // namespace optomech
