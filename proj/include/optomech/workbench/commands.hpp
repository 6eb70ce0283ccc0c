#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/noise_synthesis.hpp"
#include "optomech/workbench/config.hpp"

namespace optomech::workbench {

enum ExitCode : int {
  exit_success = 0,
  exit_internal_error = 1,
  exit_validation_error = 2,
  exit_not_converged = 3,
  exit_io_error = 4,
};

/// Entry point of the `optomech` executable; args excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

struct BudgetRun {
  QuadratureSpectrum spectrum;
  SqueezingReport report;
  RegimeMargin margin;
};

/// Spectrum, squeezing metrics and feasibility margin of one scenario at angle phi (rad).
BudgetRun evaluate_budget(const ScenarioConfig &config, double phi);

struct SweepRow {
  double value = 0.0;
  double min_relative_psd_db = 0.0;
  double at_frequency_hz = 0.0;
  double margin = 0.0;
};

/// Linear sweep of one dotted parameter at the first configured homodyne angle.
/// steps == 1 evaluates `from` only; steps == 0 is a ValidationError.
std::vector<SweepRow> run_sweep(const ScenarioConfig &config, std::string_view parameter, double from, double to,
                                std::size_t steps);

/// Spectrum CSV: frequency_hz, total_rel_shot, reference_psd, one column per source (all relative).
std::string spectrum_csv(const QuadratureSpectrum &spectrum);

/// Displacement CSV in the fit input schema, optionally with seeded log-normal bin noise.
std::string displacement_csv(const ScenarioConfig &config, double noise_fraction, std::uint64_t seed);

} // namespace optomech::workbench
