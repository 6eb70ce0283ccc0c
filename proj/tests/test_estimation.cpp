#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "optomech/errors.hpp"
#include "optomech/estimation.hpp"
#include "optomech/least_squares.hpp"

using namespace optomech;

namespace {

const MechanicalOscillator wheel = MechanicalOscillator::from_hz(1.1e-7, 249300.0, 5500.0);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

DrivenResponse driven_from(const MechanicalOscillator &osc, double calibration, std::span<const double> grid) {
  DrivenResponse r;
  for (double f : grid) {
    const auto x = calibration * susceptibility(osc, constants::two_pi * f);
    r.frequency_hz.push_back(f);
    r.magnitude.push_back(std::abs(x));
    r.phase_rad.push_back(std::arg(x));
  }
  return r;
}

} // namespace

TEST_CASE("noiseless thermal spectrum is recovered exactly") {
  const auto grid = resonance_window(wheel, 30.0, 801);
  const auto data = make_thermal_measurement(wheel, 300.0, grid, 1e-33, 0.0, 1);
  const auto fit = fit_thermal_spectrum(data, 300.0);
  REQUIRE(fit.converged);
  CHECK(rel(fit.resonance_hz, 249300.0) < 1e-8);
  CHECK(rel(fit.quality_factor, 5500.0) < 1e-8);
  CHECK(rel(fit.effective_mass_kg, 1.1e-7) < 1e-8);
  CHECK(rel(fit.floor, 1e-33) < 1e-6);
}

TEST_CASE("five percent bin noise") {
  const auto grid = resonance_window(wheel, 30.0, 801);
  std::vector<double> ef, eq, em;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto fit = fit_thermal_spectrum(make_thermal_measurement(wheel, 300.0, grid, 1e-33, 0.05, seed), 300.0);
    CHECK(fit.converged);
    ef.push_back(rel(fit.resonance_hz, 249300.0));
    eq.push_back(rel(fit.quality_factor, 5500.0));
    em.push_back(rel(fit.effective_mass_kg, 1.1e-7));
  }
  CHECK(median(ef) < 1e-3);
  CHECK(median(eq) < 0.05);
  CHECK(median(em) < 0.05);
}

TEST_CASE("standard errors shrink with the noise level") {
  const auto grid = resonance_window(wheel, 30.0, 801);
  std::vector<double> loud, quiet;
  for (std::uint64_t seed = 1; seed <= 9; ++seed) {
    loud.push_back(fit_thermal_spectrum(make_thermal_measurement(wheel, 300.0, grid, 1e-33, 0.1, seed), 300.0)
                       .quality_factor_stderr);
    quiet.push_back(fit_thermal_spectrum(make_thermal_measurement(wheel, 300.0, grid, 1e-33, 0.01, seed), 300.0)
                        .quality_factor_stderr);
  }
  CHECK(median(quiet) < median(loud));
  CHECK(median(quiet) > 0.0);
}

TEST_CASE("flat spectrum is degenerate") {
  MeasuredSpectrum flat;
  for (int i = 0; i < 50; ++i) {
    flat.frequency_hz.push_back(1e5 + i);
    flat.psd.push_back(1e-30);
  }
  CHECK_THROWS_AS(fit_thermal_spectrum(flat, 300.0), DegenerateDataError);
}

TEST_CASE("measured spectrum validation") {
  MeasuredSpectrum few{{1.0, 2.0}, {1.0, 1.0}, {}};
  CHECK_THROWS_AS(few.validate(), ValidationError);
  MeasuredSpectrum unsorted{{1, 2, 4, 3, 5}, {1, 1, 1, 1, 1}, {}};
  CHECK_THROWS_AS(unsorted.validate(), ValidationError);
  MeasuredSpectrum negative{{1, 2, 3, 4, 5}, {1, 1, -1, 1, 1}, {}};
  CHECK_THROWS_AS(negative.validate(), ValidationError);
}

TEST_CASE("fit is deterministic") {
  const auto grid = resonance_window(wheel, 30.0, 401);
  const auto data = make_thermal_measurement(wheel, 300.0, grid, 1e-33, 0.05, 7);
  const auto a = fit_thermal_spectrum(data, 300.0);
  const auto b = fit_thermal_spectrum(data, 300.0);
  CHECK(a.resonance_hz == b.resonance_hz);
  CHECK(a.quality_factor == b.quality_factor);
  CHECK(a.effective_mass_kg == b.effective_mass_kg);
  CHECK(a.iterations == b.iterations);
  CHECK(make_thermal_measurement(wheel, 300.0, grid, 1e-33, 0.05, 7).psd == data.psd);
}

TEST_CASE("scaling the spectrum by s scales the fitted mass by 1/s") {
  const auto grid = resonance_window(wheel, 30.0, 401);
  auto data = make_thermal_measurement(wheel, 300.0, grid, 0.0, 0.0, 1);
  for (double &v : data.psd) {
    v *= 4.0;
  }
  const auto fit = fit_thermal_spectrum(data, 300.0);
  CHECK(rel(fit.effective_mass_kg, 1.1e-7 / 4.0) < 1e-7);
  CHECK(rel(fit.resonance_hz, 249300.0) < 1e-9);
  CHECK(rel(fit.quality_factor, 5500.0) < 1e-7);
}

TEST_CASE("iteration cap reports non-convergence") {
  const auto grid = resonance_window(wheel, 30.0, 401);
  const auto data = make_thermal_measurement(wheel, 300.0, grid, 1e-33, 0.05, 3);
  LeastSquaresOptions opts;
  opts.max_iterations = 1;
  const auto fit = fit_thermal_spectrum(data, 300.0, ThermalFitGuess{250000.0, 3000.0, 2e-7, 1e-33}, opts);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations <= 1);
}

TEST_CASE("driven response fit") {
  const auto grid = resonance_window(wheel, 20.0, 201);
  const auto data = driven_from(wheel, 2.5e-3, grid);

  const auto fit = fit_driven_response(data, 2.5e-3);
  REQUIRE(fit.converged);
  CHECK(rel(fit.resonance_hz, 249300.0) < 1e-8);
  CHECK(rel(fit.quality_factor, 5500.0) < 1e-8);
  CHECK(rel(fit.effective_mass_kg, 1.1e-7) < 1e-8);

  SUBCASE("a wrong calibration scales only the mass") {
    const auto off = fit_driven_response(data, 5e-3);
    CHECK(rel(off.effective_mass_kg, 2.2e-7) < 1e-7);
    CHECK(rel(off.quality_factor, 5500.0) < 1e-7);
  }
  SUBCASE("magnitude only") {
    auto mag = data;
    mag.phase_rad.clear();
    const auto m = fit_driven_response(mag, 2.5e-3);
    CHECK(rel(m.quality_factor, 5500.0) < 0.02);
    CHECK(rel(m.resonance_hz, 249300.0) < 1e-4);
  }
  SUBCASE("non-positive calibration") { CHECK_THROWS_AS(fit_driven_response(data, 0.0), ValidationError); }
}

TEST_CASE("homodyne angle calibration") {
  const std::vector<OffsetSample> sweep{{0.0, 4.0}, {0.1, 3.0}, {0.2, 2.0}, {0.3, 1.0}, {0.4, 1e-300}};
  const auto pts = calibrate_homodyne_angle(sweep);
  REQUIRE(pts.size() == sweep.size());
  CHECK(pts[0].magnitude_rad == 0.0);
  CHECK(pts[1].magnitude_rad == doctest::Approx(constants::pi / 6).epsilon(1e-14));
  CHECK(pts[2].magnitude_rad == doctest::Approx(constants::pi / 4).epsilon(1e-14));
  CHECK(pts[3].magnitude_rad == doctest::Approx(constants::pi / 3).epsilon(1e-14));
  CHECK(pts[4].magnitude_rad == doctest::Approx(constants::pi / 2).epsilon(1e-14));
  CHECK(pts[2].sign_ambiguous);

  const std::vector<OffsetSample> above{{0.0, 1.0}, {0.1, 1.5}};
  CHECK_THROWS_AS(calibrate_homodyne_angle(above), DomainError);
  const std::vector<OffsetSample> no_zero{{0.1, 1.0}, {0.2, 0.5}};
  CHECK_THROWS(calibrate_homodyne_angle(no_zero));
  const std::vector<OffsetSample> dark{{0.0, 0.0}, {0.2, 0.5}};
  CHECK_THROWS(calibrate_homodyne_angle(dark));
}
