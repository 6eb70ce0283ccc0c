#pragma once

#include <complex>
#include <optional>

#include "optomech/constants.hpp"

namespace optomech {

/// Single mechanical mode of the end mirror: effective mass, resonance and viscous Q.
struct MechanicalOscillator {
  double effective_mass_kg = 0.0;
  double resonance_angular_frequency = 0.0; // rad/s
  double quality_factor = 0.0;

  static MechanicalOscillator from_hz(double mass_kg, double resonance_hz, double quality_factor);

  double resonance_hz() const { return resonance_angular_frequency / constants::two_pi; }
  /// Full width at half maximum of the displacement peak, f_M / Q.
  double linewidth_hz() const { return resonance_hz() / quality_factor; }

  /// Throws ValidationError unless mass, frequency are > 0 and Q >= 1.
  void validate() const;

  bool operator==(const MechanicalOscillator &) const = default;
};

/// Band-limited classical force noise added through the intensity of the signal beam.
struct ClassicalInjection {
  double center_frequency_hz = 0.0;
  double bandwidth_hz = 0.0;
  double force_psd_over_thermal_db = 0.0;

  double low_edge_hz() const { return center_frequency_hz - 0.5 * bandwidth_hz; }
  double high_edge_hz() const { return center_frequency_hz + 0.5 * bandwidth_hz; }
  bool contains(double frequency_hz) const {
    return frequency_hz >= low_edge_hz() && frequency_hz <= high_edge_hz();
  }

  bool operator==(const ClassicalInjection &) const = default;
};

struct NoiseEnvironment {
  static constexpr double boltzmann_constant = constants::boltzmann;

  double bath_temperature_k = 0.0;
  std::optional<ClassicalInjection> classical_injection;

  void validate() const;

  bool operator==(const NoiseEnvironment &) const = default;
};

/// Mechanical compliance in m/N. For ω > 0 the imaginary part is positive (passive loss).
using ComplexCompliance = std::complex<double>;

/// χ(ω) = 1 / (m (ω_M² − ω² − i ω ω_M / Q)). Defined for every finite real ω.
ComplexCompliance susceptibility(const MechanicalOscillator &osc, double omega);

/// One-sided thermal displacement PSD (4kT/ω)·Im χ(ω), in m²/Hz. Requires ω > 0.
double thermal_displacement_psd(const MechanicalOscillator &osc, const NoiseEnvironment &env,
                                double omega);

/// One-sided thermal force PSD −(4kT/ω)·Im(1/χ) = 4kT·m·ω_M/Q, in N²/Hz. Requires ω > 0.
double thermal_force_psd(const MechanicalOscillator &osc, const NoiseEnvironment &env, double omega);

/// White level of thermal_force_psd (viscous damping makes it ω-independent).
double thermal_force_psd(const MechanicalOscillator &osc, const NoiseEnvironment &env);

/// Second-order statistics of the amplitude (δX₁) and phase (δX₂) quadratures at one frequency.
struct QuadraturePair {
  double amplitude_psd = 0.0;        // S11
  double phase_psd = 0.0;            // S22
  std::complex<double> cross_psd{};  // S12

  /// S11 >= 0, S22 >= 0 and |S12|² <= S11·S22 up to a relative tolerance.
  bool is_physical(double relative_tolerance = 1e-12) const;
};

/// PSD of δX_φ = δX₁ cos φ − δX₂ sin φ.
double mix_quadratures(const QuadraturePair &q, double phi);

struct HomodyneAngle {
  double magnitude_rad = 0.0;
  // A single cos²φ ratio cannot tell φ from −φ.
  bool sign_ambiguous = true;
};

/// Inverts S∞(V_off)/S∞(0) = cos²φ. Ratios in [1, 1 + 1e-9] are clamped to 1; anything
/// outside [0, 1 + 1e-9] throws DomainError.
HomodyneAngle homodyne_angle_from_offset_ratio(double ratio);

inline constexpr double offset_ratio_tolerance = 1e-9;

} // namespace optomech
