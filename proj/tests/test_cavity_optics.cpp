#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "optomech/cavity_optics.hpp"
#include "optomech/errors.hpp"
#include "oracles.hpp"

using namespace optomech;

namespace {

const LaserDrive probe{1064e-9, 30e-3, 5.0, 1.0};

OpticalCavity room_temperature_cavity() {
  const double excess = excess_loss_for_finesse(1e4, 110e-6);
  return {12.2e-3, 110e-6, excess, mode_matching_for_dip(0.38, 110e-6, excess)};
}

} // namespace

TEST_CASE("finesse of a 50 ppm coupler with 40 ppm loss") {
  const auto d = derive_cavity({6e-3, 50e-6, 40e-6, 1.0}, probe);
  CHECK(d.finesse == doctest::Approx(static_cast<double>(oracle::finesse(50e-6L, 40e-6L))).epsilon(1e-14));
  CHECK(std::abs(d.finesse - 69813.17) < 0.01);
  CHECK(d.coupling_ratio == doctest::Approx(50.0 / 90.0));
  CHECK(d.linewidth_fwhm_hz * d.finesse == doctest::Approx(d.free_spectral_range_hz).epsilon(1e-15));
  CHECK(d.half_linewidth_angular == doctest::Approx(constants::pi * d.linewidth_fwhm_hz));
  CHECK(d.circulating_power_w == doctest::Approx(30e-3 * (50.0 / 90.0) * d.finesse / constants::pi));
}

TEST_CASE("finesse 1e4 with a 110 ppm coupler implies about 518 ppm excess loss") {
  const double excess = excess_loss_for_finesse(1e4, 110e-6);
  CHECK(excess * 1e6 == doctest::Approx(2e6 * constants::pi / 1e4 - 110.0).epsilon(1e-12));
  CHECK(std::abs(excess * 1e6 - 518.3) < 0.1);
  CHECK_THROWS_AS(excess_loss_for_finesse(1e6, 110e-6), DomainError);
}

TEST_CASE("mode matching reproduces a 38 percent dip") {
  const auto cav = room_temperature_cavity();
  const auto d = derive_cavity(cav, probe);
  CHECK(d.reflection_dip == doctest::Approx(0.38).epsilon(1e-12));
  CHECK(cav.mode_matching == doctest::Approx(0.6578).epsilon(1e-3));
  CHECK_THROWS_AS(mode_matching_for_dip(0.99, 110e-6, 518e-6), DomainError);
}

TEST_CASE("critical coupling with full mode matching empties the reflection") {
  const auto d = derive_cavity({1e-2, 100e-6, 100e-6, 1.0}, probe);
  CHECK(d.coupling_ratio == 0.5);
  CHECK(d.reflection_dip == 1.0);
}

TEST_CASE("dip peaks at eta = 1/2 for fixed mode matching") {
  const double total = 500e-6;
  double best_eta = 0.0;
  double best_dip = -1.0;
  for (int i = 1; i < 1000; ++i) {
    const double t = total * i / 1000.0;
    const auto d = derive_cavity({1e-2, t, total - t, 0.8}, probe);
    CHECK(d.reflection_dip >= 0.0);
    CHECK(d.reflection_dip <= 1.0);
    if (d.reflection_dip > best_dip) {
      best_dip = d.reflection_dip;
      best_eta = d.coupling_ratio;
    }
  }
  CHECK(best_eta == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(best_dip == doctest::Approx(0.8));
}

TEST_CASE("cavity validation") {
  CHECK_THROWS_AS(derive_cavity({6e-3, 0.0, 40e-6, 1.0}, probe), ValidationError);
  CHECK_THROWS_AS(derive_cavity({6e-3, 6e-3, 5e-3, 1.0}, probe), ValidationError);
  CHECK_THROWS_AS(derive_cavity({6e-3, 50e-6, -1e-6, 1.0}, probe), ValidationError);
  CHECK_THROWS_AS(derive_cavity({6e-3, 50e-6, 40e-6, 1.2}, probe), ValidationError);
  CHECK_THROWS_AS(derive_cavity({0.0, 50e-6, 40e-6, 1.0}, probe), ValidationError);
  CHECK_THROWS_AS((LaserDrive{1064e-9, 1e-3, 0.5, 0.0}.validate()), ValidationError);
}

TEST_CASE("back-action force noise for the cryogenic design") {
  const OpticalCavity cav{6e-3, 50e-6, 40e-6, 1.0};
  const auto expect = static_cast<double>(oracle::backaction_lhs(1064e-9L, 30e-3L, 50e-6L, 40e-6L, 1.0L));
  CHECK(backaction_force_psd(cav, probe) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(backaction_force_psd(cav, probe) == doctest::Approx(1.5e-28).epsilon(0.02));
  CHECK(backaction_force_psd(cav, probe, true) == doctest::Approx(5.0 * expect).epsilon(1e-12));

  LaserDrive doubled = probe;
  doubled.input_power_w *= 2.0;
  CHECK(backaction_force_psd(cav, doubled) == doctest::Approx(2.0 * backaction_force_psd(cav, probe)).epsilon(1e-15));
}

TEST_CASE("back-action of the room-temperature cavity is far below thermal force noise") {
  const LaserDrive drive{1064e-9, 5.6e-3, 1.0, 0.0};
  const auto osc = MechanicalOscillator::from_hz(1.1e-7, 249300.0, 5500.0);
  const double ba = backaction_force_psd(room_temperature_cavity(), drive);
  const double th = thermal_force_psd(osc, {300.0, std::nullopt});
  CHECK(ba < 1e-2 * th);
}

TEST_CASE("cavity pole filter") {
  CHECK(cavity_pole_filter(0.0, 1e6) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(cavity_pole_filter(1e6, 1e6)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(cavity_pole_filter(1.0, 0.0), DomainError);

  const auto d = derive_cavity(room_temperature_cavity(), {1064e-9, 5.6e-3, 1.0, 0.0});
  CHECK(d.half_linewidth_angular / constants::two_pi == doctest::Approx(614328.8073770491).epsilon(1e-12));
  CHECK(std::abs(cavity_pole_filter(constants::two_pi * 249300.0, d.half_linewidth_angular)) ==
        doctest::Approx(0.9266090854689627).epsilon(1e-12));

  double last = 2.0;
  for (double w = 0.0; w < 1e8; w += 1e6) {
    const double mag = std::abs(cavity_pole_filter(w, 3e6));
    CHECK(mag < last);
    CHECK(std::abs(cavity_pole_filter(-w, 3e6)) == doctest::Approx(mag));
    last = mag;
  }
}

TEST_CASE("displacement-to-phase gain scaling") {
  const auto base = derive_cavity({6e-3, 50e-6, 40e-6, 1.0}, probe);
  const double g = displacement_to_phase_gain(base, probe);
  CavityDerived doubled = base;
  doubled.finesse *= 2.0;
  CHECK(displacement_to_phase_gain(doubled, probe) == doctest::Approx(2.0 * g).epsilon(1e-15));
  LaserDrive red = probe;
  red.wavelength_m *= 2.0;
  CHECK(displacement_to_phase_gain(base, red) == doctest::Approx(0.5 * g).epsilon(1e-15));
}

TEST_CASE("readout chain reproduces the back-action expression") {
  for (const OpticalCavity &cav : {OpticalCavity{6e-3, 50e-6, 40e-6, 1.0}, room_temperature_cavity()}) {
    for (double power : {1e-3, 5.6e-3, 30e-3}) {
      LaserDrive drive = probe;
      drive.input_power_w = power;
      const auto verbatim = static_cast<double>(oracle::backaction_lhs(
          1064e-9L, power, cav.input_transmissivity, cav.roundtrip_excess_loss, cav.mode_matching));
      CHECK(backaction_force_psd_from_gain(cav, drive) == doctest::Approx(verbatim).epsilon(1e-10));
    }
  }
}

TEST_CASE("quantum-regime margin") {
  const auto osc = MechanicalOscillator::from_hz(5e-8, 1e5, 1e5);
  const OpticalCavity cav{6e-3, 50e-6, 40e-6, 1.0};
  const auto lhs = oracle::backaction_lhs(1064e-9L, 30e-3L, 50e-6L, 40e-6L, 1.0L);
  const auto w_m = 2.0L * oracle::pi * 1e5L;

  const auto cold = quantum_regime_margin(osc, {4.2, std::nullopt}, cav, probe);
  CHECK(cold.ratio == doctest::Approx(static_cast<double>(lhs / oracle::thermal_rhs(4.2L, 5e-8L, w_m, 1e5L))).epsilon(1e-10));
  CHECK(cold.ratio == doctest::Approx(4.171).epsilon(1e-3));
  CHECK(cold.quantum_dominated());

  const auto warm = quantum_regime_margin(osc, {300.0, std::nullopt}, cav, probe);
  CHECK(warm.ratio == doctest::Approx(cold.ratio * 4.2 / 300.0).epsilon(1e-12));
  CHECK(warm.ratio == doctest::Approx(0.0584).epsilon(1e-2));
  CHECK_FALSE(warm.quantum_dominated());

  LaserDrive scaled = probe;
  scaled.input_power_w *= 7.0;
  const auto both = quantum_regime_margin(osc, {4.2 * 7.0, std::nullopt}, cav, scaled);
  CHECK(both.ratio == doctest::Approx(cold.ratio).epsilon(1e-12));
}
