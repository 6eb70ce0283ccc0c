#include "optomech/core_model.hpp"

#include <cmath>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

void require_positive_frequency(double omega, const char *what) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError(std::string(what) + ": angular frequency must be finite and > 0");
  }
}

} // namespace

MechanicalOscillator MechanicalOscillator::from_hz(double mass_kg, double resonance_hz,
                                                   double quality_factor) {
  MechanicalOscillator osc{mass_kg, constants::two_pi * resonance_hz, quality_factor};
  osc.validate();
  return osc;
}

void MechanicalOscillator::validate() const {
  if (!(effective_mass_kg > 0.0) || !std::isfinite(effective_mass_kg)) {
    throw ValidationError("oscillator.mass_kg", "must be finite and > 0");
  }
  if (!(resonance_angular_frequency > 0.0) || !std::isfinite(resonance_angular_frequency)) {
    throw ValidationError("oscillator.resonance_frequency_hz", "must be finite and > 0");
  }
  if (!(quality_factor >= 1.0) || !std::isfinite(quality_factor)) {
    throw ValidationError("oscillator.quality_factor", "must be finite and >= 1");
  }
}

void NoiseEnvironment::validate() const {
  if (!(bath_temperature_k > 0.0) || !std::isfinite(bath_temperature_k)) {
    throw ValidationError("environment.temperature_k", "must be finite and > 0");
  }
  if (classical_injection) {
    const auto &inj = *classical_injection;
    if (!(inj.bandwidth_hz > 0.0) || !std::isfinite(inj.bandwidth_hz)) {
      throw ValidationError("environment.injection.bandwidth_hz", "must be finite and > 0");
    }
    if (!(inj.center_frequency_hz > 0.0) || !std::isfinite(inj.center_frequency_hz)) {
      throw ValidationError("environment.injection.center_frequency_hz", "must be finite and > 0");
    }
    if (!std::isfinite(inj.force_psd_over_thermal_db)) {
      throw ValidationError("environment.injection.level_db", "must be finite");
    }
  }
}

ComplexCompliance susceptibility(const MechanicalOscillator &osc, double omega) {
  const double wm = osc.resonance_angular_frequency;
  const std::complex<double> denominator{wm * wm - omega * omega, -omega * wm / osc.quality_factor};
  return 1.0 / (osc.effective_mass_kg * denominator);
}

double thermal_displacement_psd(const MechanicalOscillator &osc, const NoiseEnvironment &env,
                                double omega) {
  require_positive_frequency(omega, "thermal_displacement_psd");
  const double kt = NoiseEnvironment::boltzmann_constant * env.bath_temperature_k;
  return 4.0 * kt / omega * susceptibility(osc, omega).imag();
}

double thermal_force_psd(const MechanicalOscillator &osc, const NoiseEnvironment &env, double omega) {
  require_positive_frequency(omega, "thermal_force_psd");
  return thermal_force_psd(osc, env);
}

double thermal_force_psd(const MechanicalOscillator &osc, const NoiseEnvironment &env) {
  const double kt = NoiseEnvironment::boltzmann_constant * env.bath_temperature_k;
  return 4.0 * kt * osc.effective_mass_kg * osc.resonance_angular_frequency / osc.quality_factor;
}

bool QuadraturePair::is_physical(double relative_tolerance) const {
  if (amplitude_psd < 0.0 || phase_psd < 0.0) {
    return false;
  }
  const double product = amplitude_psd * phase_psd;
  return std::norm(cross_psd) <= product * (1.0 + relative_tolerance) + 1e-300;
}

double mix_quadratures(const QuadraturePair &q, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return q.amplitude_psd * c * c + q.phase_psd * s * s - 2.0 * c * s * q.cross_psd.real();
}

HomodyneAngle homodyne_angle_from_offset_ratio(double ratio) {
  if (!std::isfinite(ratio) || ratio < 0.0 || ratio > 1.0 + offset_ratio_tolerance) {
    throw DomainError("homodyne offset ratio must lie in [0, 1]; got " + std::to_string(ratio));
  }
  const double clamped = std::min(ratio, 1.0);
  const double magnitude = std::acos(std::sqrt(clamped));
  return {magnitude, magnitude > 0.0};
}

} // namespace optomech
