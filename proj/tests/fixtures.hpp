#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "optomech/cavity_optics.hpp"
#include "optomech/noise_synthesis.hpp"

namespace fixtures {

using namespace optomech;

inline constexpr double deg = constants::pi / 180.0;

/// Suspended-mirror quantum scenario: 50 ppm coupler, 40 ppm loss, 6 mm, 30 mW, 4.2 K.
inline SystemParameters quantum_scenario() {
  SystemParameters p;
  p.oscillator = MechanicalOscillator::from_hz(5e-8, 1e5, 1e5);
  p.environment.bath_temperature_k = 4.2;
  p.cavity = {6e-3, 50e-6, 40e-6, 1.0};
  p.laser = {1064e-9, 30e-3, 5.0, 1.0};
  p.detection = {0.1, 0.01, 1e-4, 0.0};
  p.frequency_noise_displacement_psd = 1e-33;
  return p;
}

/// Room-temperature classical analog: 12.2 mm, 110 ppm, finesse 1e4, 38 % dip, 5.6 mW, 10 dB injection.
inline SystemParameters classical_scenario() {
  SystemParameters p;
  p.oscillator = MechanicalOscillator::from_hz(1.1e-7, 249300.0, 5500.0);
  p.environment.bath_temperature_k = 300.0;
  p.environment.classical_injection = ClassicalInjection{249300.0, 15000.0, 10.0};
  const double excess = excess_loss_for_finesse(1e4, 110e-6);
  p.cavity = {12.2e-3, 110e-6, excess, mode_matching_for_dip(0.38, 110e-6, excess)};
  p.laser = {1064e-9, 5.6e-3, 1.0, 0.0};
  p.detection = {0.5, 0.01, 0.0, 1e-33};
  p.reference = ShotReference::decorrelated;
  return p;
}

/// Uniform draw of a valid random scenario, kept inside the high-finesse regime.
inline SystemParameters random_scenario(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
  SystemParameters p;
  p.oscillator = MechanicalOscillator::from_hz(log_uniform(1e-9, 1e-5), log_uniform(1e4, 1e6), log_uniform(100, 1e6));
  p.environment.bath_temperature_k = log_uniform(0.01, 400.0);
  p.cavity = {log_uniform(1e-3, 0.1), log_uniform(1e-6, 4e-3), log_uniform(1e-7, 4e-3), 0.05 + 0.95 * u(rng)};
  p.laser = {log_uniform(400e-9, 2e-6), log_uniform(1e-6, 0.1), 1.0 + log_uniform(1e-3, 100.0), log_uniform(1e-3, 1e3)};
  p.detection = {0.9 * u(rng), 0.01, 0.0, u(rng) < 0.5 ? 0.0 : log_uniform(1e-40, 1e-30)};
  if (u(rng) < 0.3) {
    const double f_m = p.oscillator.resonance_hz();
    p.environment.classical_injection = ClassicalInjection{f_m * (1.0 + 0.01 * (u(rng) - 0.5)), 0.05 * f_m, 20.0 * u(rng) - 5.0};
  }
  p.reference = u(rng) < 0.5 ? ShotReference::vacuum : ShotReference::decorrelated;
  return p;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string &tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("optomech_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
};

} // namespace fixtures
