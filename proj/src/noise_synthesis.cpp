#include "optomech/noise_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "optomech/errors.hpp"
#include "optomech/frequency_grid.hpp"

namespace optomech {

using cplx = std::complex<double>;

std::string_view to_string(NoiseSource source) {
  switch (source) {
  case NoiseSource::shot: return "shot";
  case NoiseSource::backaction: return "backaction";
  case NoiseSource::thermal: return "thermal";
  case NoiseSource::laser_amplitude: return "laser_amplitude";
  case NoiseSource::laser_frequency: return "laser_frequency";
  case NoiseSource::loss_vacuum: return "loss_vacuum";
  case NoiseSource::bs_vacuum: return "bs_vacuum";
  case NoiseSource::injected_classical: return "injected_classical";
  case NoiseSource::wideband_displacement: return "wideband_displacement";
  }
  return "unknown";
}

std::string_view to_string(ShotReference reference) {
  return reference == ShotReference::vacuum ? "vacuum" : "decorrelated";
}

std::string_view to_string(ResonanceSide side) {
  return side == ResonanceSide::below_resonance ? "below_resonance" : "above_resonance";
}

void DetectionChain::validate() const {
  if (!(detection_loss >= 0.0 && detection_loss < 1.0)) {
    throw ValidationError("detection.detection_loss", "must lie in [0, 1)");
  }
  if (!(signal_to_lo_power_ratio > 0.0) || !std::isfinite(signal_to_lo_power_ratio)) {
    throw ValidationError("detection.signal_to_lo_power_ratio", "must be finite and > 0");
  }
  if (!(homodyne_angle_rad > -constants::pi / 2 && homodyne_angle_rad <= constants::pi / 2)) {
    throw ValidationError("detection.homodyne_angle", "must lie in (-90, 90] degrees");
  }
  if (!(wideband_displacement_noise_psd >= 0.0) || !std::isfinite(wideband_displacement_noise_psd)) {
    throw ValidationError("detection.wideband_displacement_psd_m2_per_hz", "must be finite and >= 0");
  }
}

double SystemParameters::frequency_noise_displacement() const {
  if (frequency_noise_displacement_psd) {
    return *frequency_noise_displacement_psd;
  }
  const double scale = cavity.length_m / laser.optical_frequency_hz();
  return scale * scale * laser.frequency_noise_psd;
}

void SystemParameters::validate() const {
  oscillator.validate();
  environment.validate();
  cavity.validate();
  laser.validate();
  detection.validate();
  if (frequency_noise_displacement_psd &&
      (!(*frequency_noise_displacement_psd >= 0.0) || !std::isfinite(*frequency_noise_displacement_psd))) {
    throw ValidationError("detection.frequency_noise_displacement_psd_m2_per_hz", "must be finite and >= 0");
  }
}

InjectedForcePsd inject_classical_noise(const NoiseEnvironment &env, const MechanicalOscillator &osc) {
  if (!env.classical_injection) {
    throw DomainError("no classical injection configured");
  }
  const auto &inj = *env.classical_injection;
  if (!inj.contains(osc.resonance_hz())) {
    throw DomainError("injection band must contain the mechanical resonance");
  }
  return {inj.low_edge_hz(), inj.high_edge_hz(),
          thermal_force_psd(osc, env) * std::pow(10.0, inj.force_psd_over_thermal_db / 10.0)};
}

namespace {

// One noise input and how it reaches the detected quadratures: δX₁ += a·n, δX₂ += b·n,
// with n of spectral density psd (vacuum units).
struct Path {
  cplx a;
  cplx b;
  double psd;

  double mixed(double c, double s) const { return psd * std::norm(a * c - b * s); }
};

// Everything the detected field depends on at one frequency. The cavity is lossless here; its
// losses and the detection loss enter afterwards as uncorrelated vacuum admixtures.
struct FieldModel {
  Path vacuum_amplitude;
  Path vacuum_phase;
  Path laser_amplitude;
  Path injected;
  Path thermal;
  Path frequency;
  Path wideband;
  double signal_weight;     // η(1 − ε)
  double cavity_loss_weight; // (1 − η)(1 − ε)
  double detection_weight;  // ε
};

class FieldModelFactory {
public:
  explicit FieldModelFactory(const SystemParameters &p)
      : p_(p), derived_(derive_cavity(p.cavity, p.laser)), backaction_(backaction_force_psd(p.cavity, p.laser)),
        half_thermal_force_(0.5 * thermal_force_psd(p.oscillator, p.environment)),
        half_frequency_(0.5 * p.frequency_noise_displacement()),
        half_wideband_(0.5 * p.detection.wideband_displacement_noise_psd) {
    // Phase response per unit displacement, normalized so the amplitude vacuum drives
    // a force of spectral density `backaction_`.
    readout_gain_ = 2.0 * std::sqrt(backaction_) / constants::planck_reduced;
    if (p.environment.classical_injection) {
      injection_ = inject_classical_noise(p.environment, p.oscillator);
    }
  }

  FieldModel at(double omega) const {
    const double f = omega / constants::two_pi;
    const cplx chi = susceptibility(p_.oscillator, omega);
    // Conjugate of cavity_pole_filter: χ carries the e^{−iωt} sign convention.
    const cplx pole = std::conj(cavity_pole_filter(omega, derived_.half_linewidth_angular));
    const cplx reflect = 2.0 * pole - 1.0;
    const cplx pressure =
        p_.radiation_pressure ? 2.0 * backaction_ * chi * pole * pole / constants::planck_reduced : cplx{};
    const cplx displacement = readout_gain_ * pole;

    double injected_psd = 0.0;
    if (backaction_ > 0.0) {
      injected_psd = 0.5 * injection_(f) / (backaction_ * std::norm(pole));
    }

    const double eta = derived_.coupling_ratio;
    const double eps = p_.detection.detection_loss;
    return FieldModel{
        .vacuum_amplitude = {reflect, pressure, 1.0},
        .vacuum_phase = {0.0, reflect, 1.0},
        .laser_amplitude = {reflect, pressure, p_.laser.amplitude_noise_factor - 1.0},
        .injected = {reflect, pressure, injected_psd},
        .thermal = {0.0, displacement * chi, half_thermal_force_},
        .frequency = {0.0, displacement, half_frequency_},
        .wideband = {0.0, displacement, half_wideband_},
        .signal_weight = eta * (1.0 - eps),
        .cavity_loss_weight = (1.0 - eta) * (1.0 - eps),
        .detection_weight = eps,
    };
  }

private:
  const SystemParameters &p_;
  CavityDerived derived_;
  double backaction_;
  double half_thermal_force_;
  double half_frequency_;
  double half_wideband_;
  double readout_gain_ = 0.0;
  InjectedForcePsd injection_; // zero level when nothing is injected
};

QuadraturePair pair_from(const FieldModel &m) {
  QuadraturePair q;
  for (const Path *path : {&m.vacuum_amplitude, &m.vacuum_phase, &m.laser_amplitude, &m.injected, &m.thermal,
                           &m.frequency, &m.wideband}) {
    q.amplitude_psd += path->psd * std::norm(path->a);
    q.phase_psd += path->psd * std::norm(path->b);
    q.cross_psd += path->psd * path->a * std::conj(path->b);
  }
  q.amplitude_psd *= m.signal_weight;
  q.phase_psd *= m.signal_weight;
  q.cross_psd *= m.signal_weight;
  const double admixture = m.cavity_loss_weight + m.detection_weight;
  q.amplitude_psd += admixture;
  q.phase_psd += admixture;
  return q;
}

void require_angle(double phi) {
  if (!(phi > -constants::pi / 2 && phi <= constants::pi / 2)) {
    throw ValidationError("detection.homodyne_angle", "must lie in (-90, 90] degrees");
  }
}

} // namespace

QuadraturePair build_quadrature_pair(const SystemParameters &params, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError("build_quadrature_pair: angular frequency must be finite and > 0");
  }
  params.validate();
  return pair_from(FieldModelFactory(params).at(omega));
}

QuadratureSpectrum synthesize_spectrum(const SystemParameters &params, std::span<const double> frequency_hz,
                                       double phi) {
  params.validate();
  require_angle(phi);
  require_valid_grid(frequency_hz);

  const FieldModelFactory factory(params);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const std::size_t n = frequency_hz.size();

  QuadratureSpectrum out;
  out.homodyne_angle_rad = phi;
  out.frequency_hz.assign(frequency_hz.begin(), frequency_hz.end());
  out.total.resize(n);
  out.reference.resize(n);
  for (auto &v : out.per_source) {
    v.assign(n, 0.0);
  }
  auto slot = [&](NoiseSource src) -> std::vector<double> & {
    return out.per_source[static_cast<std::size_t>(src)];
  };

  for (std::size_t i = 0; i < n; ++i) {
    const FieldModel m = factory.at(constants::two_pi * frequency_hz[i]);
    const QuadraturePair q = pair_from(m);
    out.total[i] = mix_quadratures(q, phi);
    out.reference[i] =
        params.reference == ShotReference::vacuum ? 1.0 : c * c * q.amplitude_psd + s * s * 1.0;

    // Input vacuum: its direct reflection is the shot noise, the part routed through the mirror
    // (radiation-pressure term and its correlation with the reflection) is the back-action.
    const auto &va = m.vacuum_amplitude;
    const double direct = va.psd * std::norm(va.a) * c * c + m.vacuum_phase.mixed(c, s);
    const double through_mirror = va.mixed(c, s) - va.psd * std::norm(va.a) * c * c;
    const double w = m.signal_weight;
    slot(NoiseSource::shot)[i] = w * direct;
    slot(NoiseSource::backaction)[i] = w * through_mirror;
    slot(NoiseSource::laser_amplitude)[i] = w * m.laser_amplitude.mixed(c, s);
    slot(NoiseSource::injected_classical)[i] = w * m.injected.mixed(c, s);
    slot(NoiseSource::thermal)[i] = w * m.thermal.mixed(c, s);
    slot(NoiseSource::laser_frequency)[i] = w * m.frequency.mixed(c, s);
    slot(NoiseSource::wideband_displacement)[i] = w * m.wideband.mixed(c, s);
    slot(NoiseSource::loss_vacuum)[i] = m.cavity_loss_weight;
    slot(NoiseSource::bs_vacuum)[i] = m.detection_weight;
  }
  return out;
}

SqueezingReport squeezing_metrics(const QuadratureSpectrum &spectrum, double resonance_hz) {
  const auto &f = spectrum.frequency_hz;
  if (f.empty() || f.front() > 0.5 * resonance_hz || f.back() < 2.0 * resonance_hz) {
    throw DomainError("spectrum must cover [f_M/2, 2 f_M] for squeezing metrics");
  }
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (spectrum.relative_total(i) < spectrum.relative_total(lo)) {
      lo = i;
    }
    if (spectrum.relative_total(i) > spectrum.relative_total(hi)) {
      hi = i;
    }
  }
  SqueezingReport r;
  r.min_relative_psd_db = to_db(spectrum.relative_total(lo));
  r.at_frequency_hz = f[lo];
  r.side = f[lo] < resonance_hz ? ResonanceSide::below_resonance : ResonanceSide::above_resonance;
  r.max_relative_psd_db = to_db(spectrum.relative_total(hi));
  r.at_max_frequency_hz = f[hi];
  return r;
}

std::vector<double> displacement_spectrum(const SystemParameters &params, std::span<const double> frequency_hz) {
  params.validate();
  require_valid_grid(frequency_hz);
  std::optional<InjectedForcePsd> injection;
  if (params.environment.classical_injection) {
    injection = inject_classical_noise(params.environment, params.oscillator);
  }
  std::vector<double> out;
  out.reserve(frequency_hz.size());
  for (double f : frequency_hz) {
    const double omega = constants::two_pi * f;
    double psd = thermal_displacement_psd(params.oscillator, params.environment, omega) +
                 params.detection.wideband_displacement_noise_psd;
    if (injection) {
      psd += std::norm(susceptibility(params.oscillator, omega)) * (*injection)(f);
    }
    out.push_back(psd);
  }
  return out;
}

} // namespace optomech
