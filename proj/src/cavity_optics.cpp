#include "optomech/cavity_optics.hpp"

#include <cmath>

#include "optomech/errors.hpp"

namespace optomech {

using constants::pi;

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

} // namespace

void OpticalCavity::validate() const {
  if (!positive_finite(length_m)) {
    throw ValidationError("cavity.length_mm", "must be finite and > 0");
  }
  if (!(input_transmissivity > 0.0 && input_transmissivity < 1.0)) {
    throw ValidationError("cavity.input_transmissivity_ppm", "must lie in (0, 1e6) ppm");
  }
  if (!(roundtrip_excess_loss >= 0.0) || !std::isfinite(roundtrip_excess_loss)) {
    throw ValidationError("cavity.excess_loss_ppm", "must be finite and >= 0");
  }
  if (!(input_transmissivity + roundtrip_excess_loss < 0.01)) {
    throw ValidationError("cavity", "transmissivity + excess loss must stay below 1e4 ppm");
  }
  if (!(mode_matching > 0.0 && mode_matching <= 1.0)) {
    throw ValidationError("cavity.mode_matching", "must lie in (0, 1]");
  }
}

void LaserDrive::validate() const {
  if (!positive_finite(wavelength_m)) {
    throw ValidationError("laser.wavelength_nm", "must be finite and > 0");
  }
  if (!(input_power_w >= 0.0) || !std::isfinite(input_power_w)) {
    throw ValidationError("laser.input_power_mw", "must be finite and >= 0");
  }
  if (!(amplitude_noise_factor >= 1.0) || !std::isfinite(amplitude_noise_factor)) {
    throw ValidationError("laser.amplitude_noise_factor", "must be finite and >= 1");
  }
  if (!(frequency_noise_psd >= 0.0) || !std::isfinite(frequency_noise_psd)) {
    throw ValidationError("laser.frequency_noise_hz2_per_hz", "must be finite and >= 0");
  }
}

CavityDerived derive_cavity(const OpticalCavity &cav, const LaserDrive &laser) {
  cav.validate();
  const double total_loss = cav.input_transmissivity + cav.roundtrip_excess_loss;
  CavityDerived d;
  d.finesse = constants::two_pi / total_loss;
  d.free_spectral_range_hz = constants::speed_of_light / (2.0 * cav.length_m);
  d.linewidth_fwhm_hz = d.free_spectral_range_hz / d.finesse;
  d.half_linewidth_angular = pi * d.linewidth_fwhm_hz;
  d.coupling_ratio = cav.input_transmissivity / total_loss;
  d.reflection_dip = cav.mode_matching * 4.0 * d.coupling_ratio * (1.0 - d.coupling_ratio);
  d.circulating_power_w = laser.input_power_w * cav.mode_matching * d.coupling_ratio * d.finesse / pi;
  return d;
}

double excess_loss_for_finesse(double finesse, double input_transmissivity) {
  if (!positive_finite(finesse)) {
    throw DomainError("finesse must be finite and > 0");
  }
  const double excess = constants::two_pi / finesse - input_transmissivity;
  if (excess < 0.0) {
    throw DomainError("finesse is too high for this input transmissivity");
  }
  return excess;
}

double mode_matching_for_dip(double dip, double input_transmissivity, double roundtrip_excess_loss) {
  const double eta = input_transmissivity / (input_transmissivity + roundtrip_excess_loss);
  const double full = 4.0 * eta * (1.0 - eta);
  if (!(dip > 0.0) || full <= 0.0 || dip > full) {
    throw DomainError("reflection dip not reachable with mode matching in (0, 1]");
  }
  return dip / full;
}

double backaction_force_psd(const OpticalCavity &cav, const LaserDrive &laser,
                            bool include_excess_amplitude_noise) {
  const double c = constants::speed_of_light;
  const double finesse = constants::two_pi / (cav.input_transmissivity + cav.roundtrip_excess_loss);
  const double build_up = std::pow(finesse / pi, 4);
  double psd = constants::planck_reduced * laser.angular_frequency() * laser.input_power_w * (4.0 / (c * c)) *
               cav.input_transmissivity * cav.input_transmissivity * build_up * cav.mode_matching;
  if (include_excess_amplitude_noise) {
    psd *= laser.amplitude_noise_factor;
  }
  return psd;
}

double backaction_force_psd_from_gain(const OpticalCavity &cav, const LaserDrive &laser) {
  const double gain = displacement_to_phase_gain(derive_cavity(cav, laser), laser);
  return constants::planck_reduced * laser.input_power_w * cav.mode_matching * gain * gain /
         laser.angular_frequency();
}

std::complex<double> cavity_pole_filter(double omega, double kappa) {
  if (!(kappa > 0.0)) {
    throw DomainError("cavity pole must be > 0");
  }
  return 1.0 / std::complex<double>(1.0, omega / kappa);
}

double displacement_to_phase_gain(const CavityDerived &derived, const LaserDrive &laser) {
  return 8.0 * derived.finesse * derived.coupling_ratio / laser.wavelength_m;
}

RegimeMargin quantum_regime_margin(const MechanicalOscillator &osc, const NoiseEnvironment &env,
                                   const OpticalCavity &cav, const LaserDrive &laser) {
  RegimeMargin margin;
  margin.backaction_side = backaction_force_psd(cav, laser);
  margin.thermal_side = 0.5 * thermal_force_psd(osc, env);
  margin.ratio = margin.backaction_side / margin.thermal_side;
  return margin;
}

} // namespace optomech
