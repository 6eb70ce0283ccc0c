#pragma once

#include <complex>

#include "optomech/core_model.hpp"

namespace optomech {

/// Two-mirror Fabry-Perot with a movable end mirror, locked on resonance.
struct OpticalCavity {
  double length_m = 0.0;
  double input_transmissivity = 0.0; // power
  double roundtrip_excess_loss = 0.0; // every round-trip power loss except the input coupler
  double mode_matching = 1.0;

  /// High-finesse regime only: T + loss < 0.01.
  void validate() const;

  bool operator==(const OpticalCavity &) const = default;
};

struct LaserDrive {
  double wavelength_m = 1064e-9;
  double input_power_w = 0.0;
  double amplitude_noise_factor = 1.0; // amplitude PSD over shot noise, >= 1
  double frequency_noise_psd = 0.0;    // Hz²/Hz

  double angular_frequency() const { return constants::two_pi * constants::speed_of_light / wavelength_m; }
  double optical_frequency_hz() const { return constants::speed_of_light / wavelength_m; }

  void validate() const;

  bool operator==(const LaserDrive &) const = default;
};

struct CavityDerived {
  double free_spectral_range_hz = 0.0;
  double finesse = 0.0;
  double linewidth_fwhm_hz = 0.0;
  double half_linewidth_angular = 0.0; // κ, rad/s
  double coupling_ratio = 0.0;         // η
  double reflection_dip = 0.0;
  double circulating_power_w = 0.0;
};

CavityDerived derive_cavity(const OpticalCavity &cav, const LaserDrive &laser);

/// Excess round-trip loss that yields the requested finesse for a given input coupler.
double excess_loss_for_finesse(double finesse, double input_transmissivity);

/// Mode-matching efficiency that makes the modeled reflection dip equal `dip`.
/// Throws DomainError when the dip would need mode_matching outside (0, 1].
double mode_matching_for_dip(double dip, double input_transmissivity, double roundtrip_excess_loss);

/// ħω_L·P_in·(4/c²)·T²·(F/π)⁴·mode_matching, in N²/Hz, flat below the cavity pole.
/// With include_excess_amplitude_noise the laser's amplitude-noise factor multiplies the result.
double backaction_force_psd(const OpticalCavity &cav, const LaserDrive &laser,
                            bool include_excess_amplitude_noise = false);

/// Same quantity assembled from the readout chain: ħ·P_in·mode_matching·G²/ω_L,
/// G = displacement_to_phase_gain.
double backaction_force_psd_from_gain(const OpticalCavity &cav, const LaserDrive &laser);

/// 1 / (1 + iω/κ).
std::complex<double> cavity_pole_filter(double omega, double kappa);

/// Reflected phase per unit mirror displacement at DC, 8·F·η/λ (rad/m).
double displacement_to_phase_gain(const CavityDerived &derived, const LaserDrive &laser);

struct RegimeMargin {
  double backaction_side = 0.0; // N²/Hz
  double thermal_side = 0.0;    // 2kT·m·ω_M/Q, N²/Hz
  double ratio = 0.0;

  bool quantum_dominated() const { return ratio > 1.0; }
};

RegimeMargin quantum_regime_margin(const MechanicalOscillator &osc, const NoiseEnvironment &env,
                                   const OpticalCavity &cav, const LaserDrive &laser);

} // namespace optomech
