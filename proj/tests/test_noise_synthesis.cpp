#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "optomech/errors.hpp"
#include "optomech/frequency_grid.hpp"
#include "optomech/noise_synthesis.hpp"
#include "oracles.hpp"

using namespace optomech;
using fixtures::deg;

namespace {

std::vector<double> quantum_grid(const SystemParameters &p) {
  return make_frequency_grid({25e3, 400e3, 4001, 20, 401, 3000, 6001}, p.oscillator.resonance_hz(),
                             p.oscillator.linewidth_hz());
}

std::vector<double> classical_grid(const SystemParameters &p) {
  return make_frequency_grid({100e3, 600e3, 4001, 20, 401, 7500, 3001}, p.oscillator.resonance_hz(),
                             p.oscillator.linewidth_hz());
}

double min_db(const SystemParameters &p, std::span<const double> grid, double phi) {
  return squeezing_metrics(synthesize_spectrum(p, grid, phi), p.oscillator.resonance_hz()).min_relative_psd_db;
}

} // namespace

TEST_CASE("per-source decomposition sums to the mixed total") {
  for (const auto &p : {fixtures::quantum_scenario(), fixtures::classical_scenario()}) {
    const auto grid = p.environment.classical_injection ? classical_grid(p) : quantum_grid(p);
    for (double phi : {0.0, 1e-4, -20 * deg, 44 * deg, 89 * deg}) {
      const auto s = synthesize_spectrum(p, grid, phi);
      for (std::size_t i = 0; i < grid.size(); i += 7) {
        double sum = 0.0;
        for (auto src : all_noise_sources) {
          sum += s.source(src)[i];
        }
        CHECK(sum == doctest::Approx(s.total[i]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("total matches an independent transfer-matrix evaluation") {
  std::mt19937_64 rng(0x51ce);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = fixtures::random_scenario(rng);
    const double f_m = p.oscillator.resonance_hz();
    const std::vector<double> grid{0.3 * f_m, 0.99 * f_m, f_m, 1.004 * f_m, 3.0 * f_m};
    const double phi = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
    const auto s = synthesize_spectrum(p, grid, phi);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(s.total[i] == doctest::Approx(oracle::effective_model_total(p, grid[i], phi)).epsilon(1e-9));
    }
  }
}

TEST_CASE("without radiation pressure the quadratures are uncorrelated") {
  auto p = fixtures::quantum_scenario();
  p.radiation_pressure = false;
  for (double f : {5e4, 1e5, 2e5}) {
    const auto q = build_quadrature_pair(p, constants::two_pi * f);
    CHECK(q.cross_psd.real() == doctest::Approx(0.0).epsilon(1e-15));
  }
  const auto grid = quantum_grid(p);
  const auto s = synthesize_spectrum(p, grid, 0.3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(s.relative_total(i) >= 1.0 - 1e-12);
  }
}

TEST_CASE("with negligible coupling the wings follow cos^2 phi") {
  // Large classical amplitude noise at low power: the amplitude quadrature dominates and the mirror
  // barely responds to it.
  SystemParameters p;
  p.oscillator = MechanicalOscillator::from_hz(1.1e-7, 249300.0, 5500.0);
  p.environment.bath_temperature_k = 300.0;
  p.cavity = {12.2e-3, 110e-6, 518e-6, 1.0};
  p.laser = {1064e-9, 1e-5, 1e6, 0.0};
  p.detection = {0.0, 0.01, 0.0, 0.0};
  const double f_m = p.oscillator.resonance_hz();
  std::vector<double> wings;
  for (int i = 0; i <= 20; ++i) {
    wings.push_back(0.5 * f_m + i * 0.3 * f_m / 20.0);
  }
  for (int i = 0; i <= 20; ++i) {
    wings.push_back(1.25 * f_m + i * 0.75 * f_m / 20.0);
  }
  const auto base = synthesize_spectrum(p, wings, 0.0);
  for (int d = -75; d <= 75; d += 5) {
    const double phi = d * deg;
    const auto s = synthesize_spectrum(p, wings, phi);
    for (std::size_t i = 0; i < wings.size(); ++i) {
      const double law = std::cos(phi) * std::cos(phi);
      CHECK(s.total[i] / base.total[i] == doctest::Approx(law).epsilon(1e-3));
    }
  }
}

TEST_CASE("amplitude quadrature of a lossless chain is flat at the amplitude factor") {
  auto p = fixtures::quantum_scenario();
  p.cavity.roundtrip_excess_loss = 0.0;
  p.detection.detection_loss = 0.0;
  const auto grid = quantum_grid(p);
  const auto s = synthesize_spectrum(p, grid, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(s.relative_total(i) == doctest::Approx(p.laser.amplitude_noise_factor).epsilon(1e-12));
  }
}

TEST_CASE("injection raises the displacement peak by 10 log10(1 + 10^(dB/10))") {
  auto p = fixtures::classical_scenario();
  p.detection.wideband_displacement_noise_psd = 0.0;
  const std::vector<double> at_peak{p.oscillator.resonance_hz()};
  auto quiet = p;
  quiet.environment.classical_injection.reset();
  const double thermal = displacement_spectrum(quiet, at_peak)[0];

  CHECK(to_db(displacement_spectrum(p, at_peak)[0] / thermal) == doctest::Approx(10.0 * std::log10(11.0)).epsilon(1e-12));
  p.environment.classical_injection->force_psd_over_thermal_db = 0.0;
  CHECK(to_db(displacement_spectrum(p, at_peak)[0] / thermal) == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-12));

  SUBCASE("outside the band only thermal noise remains") {
    const std::vector<double> outside{240000.0, 260000.0};
    const auto with = displacement_spectrum(p, outside);
    const auto without = displacement_spectrum(quiet, outside);
    CHECK(with[0] == without[0]);
    CHECK(with[1] == without[1]);
  }
}

TEST_CASE("an injection band that misses the resonance is rejected") {
  auto p = fixtures::classical_scenario();
  p.environment.classical_injection = ClassicalInjection{300000.0, 10000.0, 10.0};
  CHECK_THROWS_AS(inject_classical_noise(p.environment, p.oscillator), DomainError);
  p.environment.classical_injection.reset();
  CHECK_THROWS_AS(inject_classical_noise(p.environment, p.oscillator), DomainError);
}

TEST_CASE("classical analog: dip side follows the sign of the homodyne angle") {
  const auto p = fixtures::classical_scenario();
  const auto grid = classical_grid(p);
  const double f_m = p.oscillator.resonance_hz();
  for (double d : {20.0, 44.0, 56.0}) {
    const auto plus = squeezing_metrics(synthesize_spectrum(p, grid, d * deg), f_m);
    const auto minus = squeezing_metrics(synthesize_spectrum(p, grid, -d * deg), f_m);
    CHECK(plus.min_relative_psd_db < -3.0);
    CHECK(minus.min_relative_psd_db < -3.0);
    CHECK(plus.side != minus.side);
  }
  const auto r = squeezing_metrics(synthesize_spectrum(p, grid, -44 * deg), f_m);
  CHECK(r.side == ResonanceSide::above_resonance);
  CHECK(r.min_relative_psd_db == doctest::Approx(-10.18).epsilon(0.01));
}

TEST_CASE("quantum design squeezes about 1.4 dB and degrades with detection loss") {
  auto p = fixtures::quantum_scenario();
  const auto grid = quantum_grid(p);
  double last = -100.0;
  for (double eps : {0.0, 0.1, 0.2, 0.4}) {
    p.detection.detection_loss = eps;
    const double depth = min_db(p, grid, 1e-4);
    CHECK(depth < 0.0);
    CHECK(depth > last);
    last = depth;
  }
  p.detection.detection_loss = 0.1;
  CHECK(min_db(p, grid, 1e-4) == doctest::Approx(-1.238).epsilon(2e-3));
}

TEST_CASE("a quiet laser at 2 mW still squeezes") {
  auto p = fixtures::quantum_scenario();
  p.laser.input_power_w = 2e-3;
  p.laser.amplitude_noise_factor = 1.0;
  const auto grid = quantum_grid(p);
  CHECK(min_db(p, grid, 1e-4) < -0.2);
}

TEST_CASE("backaction is the only source that may go negative") {
  const auto p = fixtures::classical_scenario();
  const auto grid = classical_grid(p);
  const auto s = synthesize_spectrum(p, grid, -44 * deg);
  bool saw_negative = false;
  for (auto src : all_noise_sources) {
    for (double v : s.source(src)) {
      if (src == NoiseSource::backaction) {
        saw_negative = saw_negative || v < 0.0;
      } else {
        CHECK(v >= 0.0);
      }
    }
  }
  CHECK(saw_negative);
}

TEST_CASE("decorrelated reference equals cos^2 S11 + sin^2") {
  const auto p = fixtures::classical_scenario();
  const std::vector<double> grid{150e3, 249300.0, 400e3};
  const double phi = 0.4;
  const auto s = synthesize_spectrum(p, grid, phi);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto q = build_quadrature_pair(p, constants::two_pi * grid[i]);
    const double expect = std::cos(phi) * std::cos(phi) * q.amplitude_psd + std::sin(phi) * std::sin(phi);
    CHECK(s.reference[i] == doctest::Approx(expect).epsilon(1e-14));
  }
  const auto v = synthesize_spectrum(fixtures::quantum_scenario(), grid, phi);
  for (double r : v.reference) {
    CHECK(r == 1.0);
  }
}

TEST_CASE("squeezing metrics") {
  QuadratureSpectrum flat;
  flat.frequency_hz = {40.0, 100.0, 250.0};
  flat.total = {2.0, 2.0, 2.0};
  flat.reference = {2.0, 2.0, 2.0};
  const auto r = squeezing_metrics(flat, 100.0);
  CHECK(r.min_relative_psd_db == 0.0);
  CHECK(r.max_relative_psd_db == 0.0);
  CHECK_THROWS_AS(squeezing_metrics(flat, 30.0), DomainError);
  CHECK_THROWS_AS(squeezing_metrics(flat, 200.0), DomainError);
}

TEST_CASE("frequency noise maps to displacement through L / nu") {
  auto p = fixtures::quantum_scenario();
  p.frequency_noise_displacement_psd.reset();
  CHECK(p.frequency_noise_displacement() == doctest::Approx(4.535e-34).epsilon(1e-3));
  p.frequency_noise_displacement_psd = 1e-33;
  CHECK(p.frequency_noise_displacement() == 1e-33);
}

TEST_CASE("invalid inputs") {
  auto p = fixtures::quantum_scenario();
  const std::vector<double> bad{1e5, 1e4};
  CHECK_THROWS_AS(synthesize_spectrum(p, bad, 0.0), ValidationError);
  const std::vector<double> zero{0.0, 1e4};
  CHECK_THROWS_AS(synthesize_spectrum(p, zero, 0.0), ValidationError);
  p.detection.detection_loss = 1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("frequency grid") {
  const GridSpec spec{25e3, 400e3, 4001, 20, 401, 3000, 6001};
  const auto g = make_frequency_grid(spec, 1e5, 1.0);
  CHECK(g.front() == doctest::Approx(25e3));
  CHECK(g.back() == doctest::Approx(400e3));
  CHECK(std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end());
  CHECK(std::binary_search(g.begin(), g.end(), 1e5));
  const auto near = std::count_if(g.begin(), g.end(), [](double f) { return std::abs(f - 1e5) <= 20.0; });
  CHECK(near >= 401);
  CHECK_THROWS_AS((GridSpec{10.0, 5.0}.validate()), ValidationError);
  CHECK(make_frequency_grid(spec, 1e5, 1.0) == g);
}
