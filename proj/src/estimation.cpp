#include "optomech/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "optomech/errors.hpp"

namespace optomech {

using constants::two_pi;

namespace {

void require_increasing(const std::vector<double> &f, const char *field) {
  if (f.size() < 5) {
    throw ValidationError(field, "need at least 5 samples");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0.0) || !std::isfinite(f[i])) {
      throw ValidationError(field, "frequencies must be finite and > 0");
    }
    if (i > 0 && !(f[i] > f[i - 1])) {
      throw ValidationError(field, "frequencies must be strictly increasing");
    }
  }
}

// Shape of the thermal peak: D = (ω_M² − ω²)² + (ω·ω_M/Q)², S_x^th = 4kT·ω_M / (Q·m·D).
struct LineShape {
  double detuning;  // ω_M² − ω²
  double damping;   // ω·ω_M/Q
  double d;         // D

  LineShape(double omega, double omega_m, double q)
      : detuning(omega_m * omega_m - omega * omega), damping(omega * omega_m / q),
        d(detuning * detuning + damping * damping) {}

  // ∂lnD/∂ln ω_M and ∂lnD/∂ln Q
  double dlnd_dlnw(double omega_m) const {
    return (4.0 * omega_m * omega_m * detuning + 2.0 * damping * damping) / d;
  }
  double dlnd_dlnq() const { return -2.0 * damping * damping / d; }
};

// Half-power crossing on one side of the peak, linearly interpolated. Returns NaN when absent.
double half_power_crossing(const MeasuredSpectrum &data, std::size_t peak, double level, int direction) {
  const auto &f = data.frequency_hz;
  const auto &s = data.psd;
  std::size_t i = peak;
  while (true) {
    if ((direction < 0 && i == 0) || (direction > 0 && i + 1 == s.size())) {
      return std::nan("");
    }
    const std::size_t j = direction < 0 ? i - 1 : i + 1;
    if (s[j] <= level) {
      const double t = (s[i] - level) / (s[i] - s[j]);
      return f[i] + t * (f[j] - f[i]);
    }
    i = j;
  }
}

double percentile(std::vector<double> v, double q) {
  const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

} // namespace

void MeasuredSpectrum::validate() const {
  require_increasing(frequency_hz, "frequency_hz");
  if (psd.size() != frequency_hz.size()) {
    throw ValidationError("psd_m2_per_hz", "length differs from frequency_hz");
  }
  for (double v : psd) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("psd_m2_per_hz", "values must be finite and > 0");
    }
  }
  if (!weight.empty()) {
    if (weight.size() != frequency_hz.size()) {
      throw ValidationError("weight", "length differs from frequency_hz");
    }
    for (double w : weight) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw ValidationError("weight", "values must be finite and > 0");
      }
    }
  }
}

void DrivenResponse::validate() const {
  require_increasing(frequency_hz, "frequency_hz");
  if (magnitude.size() != frequency_hz.size()) {
    throw ValidationError("magnitude", "length differs from frequency_hz");
  }
  for (double v : magnitude) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("magnitude", "values must be finite and > 0");
    }
  }
  if (!phase_rad.empty() && phase_rad.size() != frequency_hz.size()) {
    throw ValidationError("phase_rad", "length differs from frequency_hz");
  }
}

ThermalFitGuess initial_thermal_guess(const MeasuredSpectrum &data, double bath_temperature_k) {
  data.validate();
  const auto &s = data.psd;
  const auto peak = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  const double floor_level = percentile(s, 0.1);
  if (s[peak] < std::pow(10.0, 0.3) * floor_level) {
    throw DegenerateDataError("no resonance peak at least 3 dB above the spectrum floor");
  }

  const double f0 = data.frequency_hz[peak];
  const double half = 0.5 * s[peak];
  const double lo = half_power_crossing(data, peak, half, -1);
  const double hi = half_power_crossing(data, peak, half, +1);
  double width = 0.0;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    width = hi - lo;
  } else if (std::isfinite(lo)) {
    width = 2.0 * (f0 - lo);
  } else if (std::isfinite(hi)) {
    width = 2.0 * (hi - f0);
  } else {
    width = data.frequency_hz.back() - data.frequency_hz.front();
  }

  ThermalFitGuess g;
  g.resonance_hz = f0;
  g.quality_factor = std::max(1.0, f0 / width);
  const double omega = two_pi * f0;
  g.effective_mass_kg = 4.0 * constants::boltzmann * bath_temperature_k * g.quality_factor /
                        (s[peak] * omega * omega * omega);
  g.floor = 0.5 * *std::min_element(s.begin(), s.end());
  return g;
}

FitResult fit_thermal_spectrum(const MeasuredSpectrum &data, double bath_temperature_k,
                               std::optional<ThermalFitGuess> initial_guess, const LeastSquaresOptions &options) {
  data.validate();
  if (!(bath_temperature_k > 0.0)) {
    throw ValidationError("temperature_k", "must be > 0");
  }
  const ThermalFitGuess guess = initial_guess ? *initial_guess : initial_thermal_guess(data, bath_temperature_k);

  const double four_kt = 4.0 * constants::boltzmann * bath_temperature_k;
  const double floor_scale = *std::max_element(data.psd.begin(), data.psd.end());
  const auto n = static_cast<Eigen::Index>(data.psd.size());

  std::vector<double> sqrt_weight(data.psd.size(), 1.0);
  if (!data.weight.empty()) {
    std::transform(data.weight.begin(), data.weight.end(), sqrt_weight.begin(), [](double w) { return std::sqrt(w); });
  }
  std::vector<double> log_psd(data.psd.size());
  std::transform(data.psd.begin(), data.psd.end(), log_psd.begin(), [](double v) { return std::log(v); });

  // x = (ln ω_M, ln Q, ln m, floor / floor_scale)
  auto residuals = [&](const Eigen::VectorXd &x, Eigen::VectorXd &r, Eigen::MatrixXd &jac) {
    const double omega_m = std::exp(x[0]);
    const double q = std::exp(x[1]);
    const double m = std::exp(x[2]);
    const double floor = x[3] * floor_scale;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double omega = two_pi * data.frequency_hz[k];
      const LineShape shape(omega, omega_m, q);
      const double thermal = four_kt * omega_m / (q * m * shape.d);
      const double model = thermal + floor;
      const double w = sqrt_weight[k];
      const double share = thermal / model;
      r[i] = w * (std::log(model) - log_psd[k]);
      jac(i, 0) = w * share * (1.0 - shape.dlnd_dlnw(omega_m));
      jac(i, 1) = w * share * (-1.0 - shape.dlnd_dlnq());
      jac(i, 2) = -w * share;
      jac(i, 3) = w * floor_scale / model;
    }
  };

  Eigen::VectorXd start(4);
  start << std::log(two_pi * guess.resonance_hz), std::log(guess.quality_factor), std::log(guess.effective_mass_kg),
      guess.floor / floor_scale;
  const auto lm = levenberg_marquardt(residuals, start, n, options, [](Eigen::VectorXd &x) { x[3] = std::max(x[3], 0.0); });

  FitResult out;
  const auto &x = lm.parameters;
  out.resonance_hz = std::exp(x[0]) / two_pi;
  out.quality_factor = std::exp(x[1]);
  out.effective_mass_kg = std::exp(x[2]);
  out.floor = x[3] * floor_scale;
  const auto &cov = lm.covariance;
  out.resonance_hz_stderr = out.resonance_hz * std::sqrt(std::max(cov(0, 0), 0.0));
  out.quality_factor_stderr = out.quality_factor * std::sqrt(std::max(cov(1, 1), 0.0));
  out.effective_mass_kg_stderr = out.effective_mass_kg * std::sqrt(std::max(cov(2, 2), 0.0));
  out.floor_stderr = floor_scale * std::sqrt(std::max(cov(3, 3), 0.0));
  out.residual_norm = std::sqrt(2.0 * lm.cost);
  out.converged = lm.converged;
  out.iterations = lm.iterations;
  return out;
}

FitResult fit_driven_response(const DrivenResponse &data, double force_calibration_n_per_unit,
                              const LeastSquaresOptions &options) {
  data.validate();
  if (!(force_calibration_n_per_unit > 0.0) || !std::isfinite(force_calibration_n_per_unit)) {
    throw ValidationError("force_calibration", "must be finite and > 0");
  }
  const std::size_t count = data.frequency_hz.size();
  const bool with_phase = !data.phase_rad.empty();
  const auto n = static_cast<Eigen::Index>(with_phase ? 2 * count : count);

  std::vector<double> log_chi(count);
  for (std::size_t k = 0; k < count; ++k) {
    log_chi[k] = std::log(data.magnitude[k] / force_calibration_n_per_unit);
  }

  // Starting point from the magnitude peak; |χ| at resonance is Q/(m·ω_M²).
  const auto peak = static_cast<std::size_t>(std::max_element(data.magnitude.begin(), data.magnitude.end()) -
                                             data.magnitude.begin());
  MeasuredSpectrum power{data.frequency_hz, {}, {}};
  power.psd.reserve(count);
  for (double v : data.magnitude) {
    power.psd.push_back(v * v);
  }
  if (power.psd[peak] < std::pow(10.0, 0.3) * percentile(power.psd, 0.1)) {
    throw DegenerateDataError("no resonance peak at least 3 dB above the response floor");
  }
  const double f0 = data.frequency_hz[peak];
  const double lo = half_power_crossing(power, peak, 0.5 * power.psd[peak], -1);
  const double hi = half_power_crossing(power, peak, 0.5 * power.psd[peak], +1);
  double width = data.frequency_hz.back() - data.frequency_hz.front();
  if (std::isfinite(lo) && std::isfinite(hi)) {
    width = hi - lo;
  } else if (std::isfinite(lo)) {
    width = 2.0 * (f0 - lo);
  } else if (std::isfinite(hi)) {
    width = 2.0 * (hi - f0);
  }
  const double q0 = std::max(1.0, f0 / width);
  const double w0 = two_pi * f0;
  const double m0 = q0 / (std::exp(log_chi[peak]) * w0 * w0);

  auto residuals = [&](const Eigen::VectorXd &x, Eigen::VectorXd &r, Eigen::MatrixXd &jac) {
    const double omega_m = std::exp(x[0]);
    const double q = std::exp(x[1]);
    const double m = std::exp(x[2]);
    for (std::size_t k = 0; k < count; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const double omega = two_pi * data.frequency_hz[k];
      const LineShape shape(omega, omega_m, q);
      r[i] = -std::log(m) - 0.5 * std::log(shape.d) - log_chi[k];
      jac(i, 0) = -0.5 * shape.dlnd_dlnw(omega_m);
      jac(i, 1) = -0.5 * shape.dlnd_dlnq();
      jac(i, 2) = -1.0;
      if (with_phase) {
        const auto j = static_cast<Eigen::Index>(count + k);
        const double phase = std::atan2(shape.damping, shape.detuning);
        r[j] = std::remainder(phase - data.phase_rad[k], two_pi);
        const double xy = shape.detuning * shape.damping;
        jac(j, 0) = (xy - 2.0 * omega_m * omega_m * shape.damping) / shape.d;
        jac(j, 1) = -xy / shape.d;
        jac(j, 2) = 0.0;
      }
    }
  };

  Eigen::VectorXd start(3);
  start << std::log(w0), std::log(q0), std::log(m0);
  const auto lm = levenberg_marquardt(residuals, start, n, options);

  FitResult out;
  const auto &x = lm.parameters;
  out.resonance_hz = std::exp(x[0]) / two_pi;
  out.quality_factor = std::exp(x[1]);
  out.effective_mass_kg = std::exp(x[2]);
  const auto &cov = lm.covariance;
  out.resonance_hz_stderr = out.resonance_hz * std::sqrt(std::max(cov(0, 0), 0.0));
  out.quality_factor_stderr = out.quality_factor * std::sqrt(std::max(cov(1, 1), 0.0));
  out.effective_mass_kg_stderr = out.effective_mass_kg * std::sqrt(std::max(cov(2, 2), 0.0));
  out.residual_norm = std::sqrt(2.0 * lm.cost);
  out.converged = lm.converged;
  out.iterations = lm.iterations;
  return out;
}

std::vector<AngleCalibrationPoint> calibrate_homodyne_angle(std::span<const OffsetSample> sweep) {
  const auto zero = std::find_if(sweep.begin(), sweep.end(), [](const OffsetSample &s) { return s.offset == 0.0; });
  if (zero == sweep.end()) {
    throw ValidationError("offset", "sweep has no zero-offset reference entry");
  }
  for (const auto &s : sweep) {
    if (!(s.high_frequency_psd > 0.0) || !std::isfinite(s.high_frequency_psd)) {
      throw ValidationError("high_frequency_psd", "values must be finite and > 0");
    }
  }
  std::vector<AngleCalibrationPoint> out;
  out.reserve(sweep.size());
  for (const auto &s : sweep) {
    const HomodyneAngle a = homodyne_angle_from_offset_ratio(s.high_frequency_psd / zero->high_frequency_psd);
    out.push_back({s.offset, a.magnitude_rad, a.sign_ambiguous});
  }
  return out;
}

MeasuredSpectrum make_thermal_measurement(const MechanicalOscillator &osc, double bath_temperature_k,
                                          std::span<const double> frequency_hz, double floor,
                                          double noise_fraction, std::uint64_t seed) {
  osc.validate();
  const NoiseEnvironment env{bath_temperature_k, std::nullopt};
  env.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MeasuredSpectrum out;
  out.frequency_hz.assign(frequency_hz.begin(), frequency_hz.end());
  out.psd.reserve(frequency_hz.size());
  for (double f : frequency_hz) {
    double v = thermal_displacement_psd(osc, env, two_pi * f) + floor;
    if (noise_fraction > 0.0) {
      v *= std::exp(noise_fraction * normal(rng));
    }
    out.psd.push_back(v);
  }
  return out;
}

std::vector<double> resonance_window(const MechanicalOscillator &osc, double half_width_linewidths,
                                     std::size_t points) {
  const double f0 = osc.resonance_hz();
  const double lo = std::max(f0 - half_width_linewidths * osc.linewidth_hz(), 0.1 * f0);
  const double hi = f0 + half_width_linewidths * osc.linewidth_hz();
  std::vector<double> f(points);
  for (std::size_t i = 0; i < points; ++i) {
    f[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return f;
}

} // namespace optomech
