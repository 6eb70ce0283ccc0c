#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "optomech/core_model.hpp"
#include "optomech/least_squares.hpp"

namespace optomech {

/// One-sided displacement PSD samples, optionally with per-bin weights (inverse variances of log-PSD).
struct MeasuredSpectrum {
  std::vector<double> frequency_hz;
  std::vector<double> psd; // m²/Hz
  std::vector<double> weight; // empty = uniform

  void validate() const;
};

/// Complex response x/u to a calibrated amplitude modulation u.
struct DrivenResponse {
  std::vector<double> frequency_hz;
  std::vector<double> magnitude; // m per modulation unit
  std::vector<double> phase_rad; // empty = magnitude-only fit

  void validate() const;
};

struct FitResult {
  double resonance_hz = 0.0;
  double quality_factor = 0.0;
  double effective_mass_kg = 0.0;
  double floor = 0.0; // m²/Hz (always 0 for driven fits)

  double resonance_hz_stderr = 0.0;
  double quality_factor_stderr = 0.0;
  double effective_mass_kg_stderr = 0.0;
  double floor_stderr = 0.0;

  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;

  MechanicalOscillator oscillator() const {
    return MechanicalOscillator::from_hz(effective_mass_kg, resonance_hz, quality_factor);
  }
};

struct ThermalFitGuess {
  double resonance_hz = 0.0;
  double quality_factor = 0.0;
  double effective_mass_kg = 0.0;
  double floor = 0.0;
};

/// Starting point from the data: argmax bin, −3 dB width and peak height 4kTQ/(mω_M³).
/// Throws DegenerateDataError when the peak stands less than 3 dB above the floor.
ThermalFitGuess initial_thermal_guess(const MeasuredSpectrum &data, double bath_temperature_k);

/// Least-squares fit of log(S_x^th(f; f_M, Q, m) + floor) to log(psd), floor >= 0.
FitResult fit_thermal_spectrum(const MeasuredSpectrum &data, double bath_temperature_k,
                               std::optional<ThermalFitGuess> initial_guess = std::nullopt,
                               const LeastSquaresOptions &options = {});

/// Fits log|χ| (and the phase of χ when present) with χ = response / force_calibration.
/// force_calibration is newtons per modulation unit.
FitResult fit_driven_response(const DrivenResponse &data, double force_calibration_n_per_unit,
                              const LeastSquaresOptions &options = {});

struct OffsetSample {
  double offset = 0.0;          // V_off
  double high_frequency_psd = 0.0; // S_∞
};

struct AngleCalibrationPoint {
  double offset = 0.0;
  double magnitude_rad = 0.0;
  bool sign_ambiguous = true;
};

/// |φ| per sample from S_∞(V_off)/S_∞(0) = cos²φ.
std::vector<AngleCalibrationPoint> calibrate_homodyne_angle(std::span<const OffsetSample> sweep);

/// Thermal spectrum plus floor on the given grid, each bin scaled by exp(σ·n), n ~ N(0,1).
/// σ = 0 gives the exact model.
MeasuredSpectrum make_thermal_measurement(const MechanicalOscillator &osc, double bath_temperature_k,
                                          std::span<const double> frequency_hz, double floor,
                                          double noise_fraction, std::uint64_t seed);

/// Linear grid over ±half_width_linewidths·(f_M/Q), clipped to stay above f_M/10.
std::vector<double> resonance_window(const MechanicalOscillator &osc, double half_width_linewidths,
                                     std::size_t points);

} // namespace optomech
