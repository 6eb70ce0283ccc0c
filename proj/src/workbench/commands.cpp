#include "optomech/workbench/commands.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "optomech/errors.hpp"
#include "optomech/estimation.hpp"
#include "optomech/workbench/csv_io.hpp"
#include "optomech/workbench/number_format.hpp"

namespace optomech::workbench {

namespace fs = std::filesystem;
using nlohmann::json;

BudgetRun evaluate_budget(const ScenarioConfig &config, double phi) {
  config.validate();
  const SystemParameters params = config.system();
  const auto grid = config.frequency_grid();
  BudgetRun run;
  run.spectrum = synthesize_spectrum(params, grid, phi);
  run.report = squeezing_metrics(run.spectrum, config.oscillator.resonance_frequency_hz);
  run.margin = quantum_regime_margin(params.oscillator, params.environment, params.cavity, params.laser);
  return run;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig &config, std::string_view parameter, double from, double to,
                                std::size_t steps) {
  if (steps == 0) {
    throw ValidationError("steps", "must be >= 1");
  }
  if (!std::isfinite(from) || !std::isfinite(to)) {
    throw ValidationError("from", "sweep bounds must be finite");
  }
  get_parameter(config, parameter);
  const auto angles = config.homodyne_angles_rad();
  if (angles.empty()) {
    throw ValidationError("detection.homodyne_angles_deg", "sweep needs at least one homodyne angle");
  }
  std::vector<SweepRow> rows;
  rows.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double value =
        steps == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
    ScenarioConfig step = config;
    set_parameter(step, parameter, value);
    const BudgetRun run = evaluate_budget(step, step.homodyne_angles_rad().front());
    rows.push_back({value, run.report.min_relative_psd_db, run.report.at_frequency_hz, run.margin.ratio});
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow &a, const SweepRow &b) { return a.value < b.value; });
  return rows;
}

std::string spectrum_csv(const QuadratureSpectrum &s) {
  const std::size_t n = s.frequency_hz.size();
  std::vector<double> total(n);
  for (std::size_t i = 0; i < n; ++i) {
    total[i] = s.relative_total(i);
  }
  std::array<std::vector<double>, noise_source_count> relative;
  for (std::size_t k = 0; k < noise_source_count; ++k) {
    relative[k].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      relative[k][i] = s.per_source[k][i] / s.reference[i];
    }
  }
  std::vector<CsvColumn> cols{{"frequency_hz", s.frequency_hz}, {"total_rel_shot", total},
                              {"reference_psd", s.reference}};
  for (std::size_t k = 0; k < noise_source_count; ++k) {
    cols.push_back({std::string(to_string(all_noise_sources[k])), relative[k]});
  }
  return format_csv(cols);
}

std::string displacement_csv(const ScenarioConfig &config, double noise_fraction, std::uint64_t seed) {
  config.validate();
  if (!(noise_fraction >= 0.0) || !std::isfinite(noise_fraction)) {
    throw ValidationError("noise", "must be finite and >= 0");
  }
  const auto grid = config.frequency_grid();
  std::vector<double> psd = displacement_spectrum(config.system(), grid);
  if (noise_fraction > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double &v : psd) {
      v *= std::exp(noise_fraction * normal(rng));
    }
  }
  const std::vector<CsvColumn> cols{{"frequency_hz", grid}, {"psd_m2_per_hz", psd}};
  return format_csv(cols);
}

namespace {

json report_json(const SqueezingReport &r) {
  return {{"min_relative_psd_db", r.min_relative_psd_db},
          {"at_frequency_hz", r.at_frequency_hz},
          {"side", std::string(to_string(r.side))},
          {"max_relative_psd_db", r.max_relative_psd_db},
          {"at_max_frequency_hz", r.at_max_frequency_hz}};
}

json margin_json(const RegimeMargin &m) {
  return {{"backaction_side_n2_per_hz", m.backaction_side},
          {"thermal_side_n2_per_hz", m.thermal_side},
          {"margin", m.ratio},
          {"verdict", m.quantum_dominated() ? "quantum-dominated" : "thermal-dominated"}};
}

json fit_json(const FitResult &f) {
  return {{"resonance_hz", f.resonance_hz},
          {"quality_factor", f.quality_factor},
          {"effective_mass_kg", f.effective_mass_kg},
          {"floor_m2_per_hz", f.floor},
          {"stderr",
           {{"resonance_hz", f.resonance_hz_stderr},
            {"quality_factor", f.quality_factor_stderr},
            {"effective_mass_kg", f.effective_mass_kg_stderr},
            {"floor_m2_per_hz", f.floor_stderr}}},
          {"residual_norm", f.residual_norm},
          {"converged", f.converged},
          {"iterations", f.iterations}};
}

std::vector<double> parse_phi_list(const std::string &text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    start = comma == std::string::npos ? text.size() + 1 : comma + 1;
    if (item.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    double v = 0.0;
    const char *b = item.data() + item.find_first_not_of(" \t");
    const char *e = item.data() + item.find_last_not_of(" \t") + 1;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e) {
      throw ValidationError("phi", "\"" + item + "\" is not a number of degrees");
    }
    out.push_back(v);
  }
  return out;
}

void ensure_directory(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
}

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::optional<std::string> out_dir; // unset: "." for commands that always write files
  std::optional<std::string> phi;
  std::uint64_t seed = 1;
  std::string format = "json";
};

ScenarioConfig resolve_config(const CommonOptions &o) {
  if (!o.config_path.empty() && !o.preset.empty()) {
    throw ValidationError("preset", "give --config or --preset, not both (a config file may name its own preset)");
  }
  if (!o.config_path.empty()) {
    return load_config(o.config_path);
  }
  if (!o.preset.empty()) {
    ScenarioConfig c = make_preset(o.preset);
    c.validate();
    return c;
  }
  throw ValidationError("config", "one of --config or --preset is required");
}

// Angles in radians: --phi (degrees) when given, else the configured list. Empty is an error.
std::vector<double> resolve_angles(const CommonOptions &o, const ScenarioConfig &cfg) {
  std::vector<double> angles;
  if (o.phi) {
    for (double deg : parse_phi_list(*o.phi)) {
      angles.push_back(deg * constants::pi / 180.0);
    }
  } else {
    angles = cfg.homodyne_angles_rad();
  }
  if (angles.empty()) {
    throw ValidationError("phi", "homodyne angle list is empty");
  }
  for (double a : angles) {
    if (!(a > -constants::pi / 2 && a <= constants::pi / 2)) {
      throw ValidationError("phi", "angles must lie in (-90, 90] degrees");
    }
  }
  return angles;
}

json scenario_echo(const ScenarioConfig &cfg) { return json::parse(to_json(cfg)); }

int cmd_synth(const CommonOptions &o, const std::string &kind, double noise, std::ostream &out) {
  const ScenarioConfig cfg = resolve_config(o);
  const fs::path dir(o.out_dir.value_or("."));
  json summary = {{"command", "synth"}, {"kind", kind}, {"seed", o.seed}, {"scenario", scenario_echo(cfg)}};

  if (kind == "displacement") {
    const std::string csv = displacement_csv(cfg, noise, o.seed);
    ensure_directory(dir);
    write_text_file(dir / "displacement.csv", csv);
    summary["noise_fraction"] = noise;
    summary["files"] = {"displacement.csv"};
  } else if (kind == "quadrature") {
    const auto angles = resolve_angles(o, cfg);
    const SystemParameters params = cfg.system();
    const auto grid = cfg.frequency_grid();
    std::vector<std::pair<std::string, std::string>> files;
    json spectra = json::array();
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const auto spec = synthesize_spectrum(params, grid, angles[i]);
      const auto report = squeezing_metrics(spec, cfg.oscillator.resonance_frequency_hz);
      const std::string name = "spectrum_" + std::to_string(i) + ".csv";
      files.emplace_back(name, spectrum_csv(spec));
      spectra.push_back({{"file", name},
                         {"homodyne_angle_rad", angles[i]},
                         {"homodyne_angle_deg", angles[i] * 180.0 / constants::pi},
                         {"squeezing", report_json(report)}});
    }
    summary["reference"] = std::string(to_string(params.reference));
    summary["spectra"] = spectra;
    summary["quantum_regime_margin"] =
        margin_json(quantum_regime_margin(params.oscillator, params.environment, params.cavity, params.laser));
    ensure_directory(dir);
    json names = json::array();
    for (const auto &[name, text] : files) {
      write_text_file(dir / name, text);
      names.push_back(name);
    }
    summary["files"] = names;
  } else {
    throw ValidationError("kind", "must be quadrature or displacement");
  }
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return exit_success;
}

int cmd_budget(const CommonOptions &o, std::ostream &out) {
  const ScenarioConfig cfg = resolve_config(o);
  const auto angles = resolve_angles(o, cfg);
  const BudgetRun run = evaluate_budget(cfg, angles.front());
  const std::string csv = spectrum_csv(run.spectrum);

  // Budget at the frequency of the deepest point, per source, relative to the reference level.
  const auto &s = run.spectrum;
  const auto at = static_cast<std::size_t>(
      std::find(s.frequency_hz.begin(), s.frequency_hz.end(), run.report.at_frequency_hz) - s.frequency_hz.begin());
  json at_min = json::object();
  for (std::size_t k = 0; k < noise_source_count; ++k) {
    at_min[std::string(to_string(all_noise_sources[k]))] = s.per_source[k][at] / s.reference[at];
  }

  const fs::path dir(o.out_dir.value_or("."));
  json summary = {{"command", "budget"},
                  {"scenario", scenario_echo(cfg)},
                  {"homodyne_angle_rad", angles.front()},
                  {"reference", std::string(to_string(cfg.detection.reference))},
                  {"squeezing", report_json(run.report)},
                  {"min_total_db", run.report.min_relative_psd_db},
                  {"budget_at_min", at_min},
                  {"quantum_regime_margin", margin_json(run.margin)},
                  {"files", {"budget.csv"}}};
  ensure_directory(dir);
  write_text_file(dir / "budget.csv", csv);
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return exit_success;
}

int cmd_fit(const CommonOptions &o, const std::string &input, const std::string &mode, double temperature,
            double calibration, std::ostream &out) {
  FitResult result;
  if (mode == "thermal") {
    if (!(temperature > 0.0)) {
      throw ValidationError("temperature", "--temperature (K) must be > 0 for thermal fits");
    }
    result = fit_thermal_spectrum(read_spectrum_csv(input), temperature);
  } else if (mode == "driven") {
    result = fit_driven_response(read_response_csv(input), calibration);
  } else {
    throw ValidationError("mode", "must be thermal or driven");
  }
  json j = {{"command", "fit"}, {"mode", mode}, {"input", input}, {"result", fit_json(result)}};
  if (mode == "thermal") {
    j["temperature_k"] = temperature;
  } else {
    j["force_calibration_n_per_unit"] = calibration;
  }
  if (o.format == "csv") {
    const std::vector<std::pair<std::string, double>> rows{
        {"resonance_hz", result.resonance_hz},
        {"quality_factor", result.quality_factor},
        {"effective_mass_kg", result.effective_mass_kg},
        {"floor_m2_per_hz", result.floor},
        {"resonance_hz_stderr", result.resonance_hz_stderr},
        {"quality_factor_stderr", result.quality_factor_stderr},
        {"effective_mass_kg_stderr", result.effective_mass_kg_stderr},
        {"floor_m2_per_hz_stderr", result.floor_stderr},
        {"residual_norm", result.residual_norm},
        {"converged", result.converged ? 1.0 : 0.0},
        {"iterations", static_cast<double>(result.iterations)}};
    out << "name,value\n";
    for (const auto &[k, v] : rows) {
      out << k << "," << format_double(v) << "\n";
    }
  } else {
    out << j.dump(2) << "\n";
  }
  if (o.out_dir) {
    ensure_directory(*o.out_dir);
    write_text_file(fs::path(*o.out_dir) / "fit.json", j.dump(2) + "\n");
  }
  return result.converged ? exit_success : exit_not_converged;
}

int cmd_feasibility(const CommonOptions &o, std::ostream &out) {
  const ScenarioConfig cfg = resolve_config(o);
  const SystemParameters p = cfg.system();
  const RegimeMargin m = quantum_regime_margin(p.oscillator, p.environment, p.cavity, p.laser);
  if (o.format == "csv") {
    out << "name,value\n"
        << "backaction_side_n2_per_hz," << format_double(m.backaction_side) << "\n"
        << "thermal_side_n2_per_hz," << format_double(m.thermal_side) << "\n"
        << "margin," << format_double(m.ratio) << "\n"
        << "verdict," << (m.quantum_dominated() ? "quantum-dominated" : "thermal-dominated") << "\n";
  } else {
    json j = margin_json(m);
    j["command"] = "feasibility";
    out << j.dump(2) << "\n";
  }
  return exit_success;
}

int cmd_sweep(const CommonOptions &o, const std::string &parameter, double from, double to, std::size_t steps,
              std::ostream &out) {
  const ScenarioConfig cfg = resolve_config(o);
  const auto rows = run_sweep(cfg, parameter, from, to, steps);
  std::vector<double> value, min_db, at, margin;
  for (const auto &r : rows) {
    value.push_back(r.value);
    min_db.push_back(r.min_relative_psd_db);
    at.push_back(r.at_frequency_hz);
    margin.push_back(r.margin);
  }
  const fs::path dir(o.out_dir.value_or("."));
  ensure_directory(dir);
  if (o.format == "json") {
    json arr = json::array();
    for (const auto &r : rows) {
      arr.push_back({{"value", r.value},
                     {"min_relative_psd_db", r.min_relative_psd_db},
                     {"at_frequency_hz", r.at_frequency_hz},
                     {"margin", r.margin}});
    }
    const json j = {{"command", "sweep"}, {"parameter", parameter}, {"rows", arr}};
    write_text_file(dir / "sweep.json", j.dump(2) + "\n");
    out << j.dump(2) << "\n";
  } else {
    const std::vector<CsvColumn> cols{
        {"value", value}, {"min_relative_psd_db", min_db}, {"at_frequency_hz", at}, {"margin", margin}};
    const std::string csv = format_csv(cols);
    write_text_file(dir / "sweep.csv", csv);
    out << csv;
  }
  return exit_success;
}

int cmd_angle_cal(const CommonOptions &o, const std::string &input, std::ostream &out) {
  const auto sweep = read_offset_csv(input);
  const auto points = calibrate_homodyne_angle(sweep);
  std::vector<double> offset, rad, deg, ambiguous;
  for (const auto &p : points) {
    offset.push_back(p.offset);
    rad.push_back(p.magnitude_rad);
    deg.push_back(p.magnitude_rad * 180.0 / constants::pi);
    ambiguous.push_back(p.sign_ambiguous ? 1.0 : 0.0);
  }
  const std::vector<CsvColumn> cols{
      {"offset", offset}, {"phi_abs_rad", rad}, {"phi_abs_deg", deg}, {"sign_ambiguous", ambiguous}};
  const std::string csv = format_csv(cols);
  if (o.out_dir) {
    ensure_directory(*o.out_dir);
    write_text_file(fs::path(*o.out_dir) / "angle_cal.csv", csv);
  }
  out << csv;
  return exit_success;
}

int cmd_echo(const CommonOptions &o, std::ostream &out) {
  const ScenarioConfig cfg = resolve_config(o);
  out << (o.format == "json" ? to_json(cfg) : to_toml(cfg));
  return exit_success;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Cavity optomechanics noise workbench", "optomech"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App *sub, bool config, bool out_dir) {
    if (config) {
      sub->add_option("--config", common.config_path, "Scenario file (.toml or .json)");
      sub->add_option("--preset", common.preset, "Named scenario")->check(CLI::IsMember({"paper-classical", "paper-quantum"}));
    }
    if (out_dir) {
      sub->add_option("--out", common.out_dir, "Output directory");
    }
  };

  std::string kind = "quadrature";
  double noise = 0.0;
  auto *synth = app.add_subcommand("synth", "Homodyne spectra per angle, or a displacement spectrum");
  add_common(synth, true, true);
  synth->add_option("--phi", common.phi, "Homodyne angles in degrees, comma separated");
  synth->add_option("--kind", kind, "quadrature or displacement")->check(CLI::IsMember({"quadrature", "displacement"}));
  synth->add_option("--noise", noise, "Log-normal bin noise fraction for displacement spectra");
  synth->add_option("--seed", common.seed, "Seed for synthetic noise");

  auto *budget = app.add_subcommand("budget", "Per-source noise budget at one homodyne angle");
  add_common(budget, true, true);
  budget->add_option("--phi", common.phi, "Homodyne angle in degrees (first entry is used)");

  std::string input;
  std::string mode = "thermal";
  double temperature = 0.0;
  double calibration = 1.0;
  auto *fit = app.add_subcommand("fit", "Fit oscillator parameters to a measured spectrum or response");
  add_common(fit, false, true);
  fit->add_option("input", input, "CSV file")->required();
  fit->add_option("--mode", mode, "thermal or driven")->check(CLI::IsMember({"thermal", "driven"}));
  fit->add_option("--temperature", temperature, "Bath temperature in K (thermal mode)");
  fit->add_option("--force-calibration", calibration, "Newtons per modulation unit (driven mode)");
  fit->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto *feas = app.add_subcommand("feasibility", "Back-action versus thermal force noise");
  add_common(feas, true, false);
  feas->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  std::size_t steps = 0;
  auto *sweep = app.add_subcommand("sweep", "Minimum relative noise and margin along one parameter");
  add_common(sweep, true, true);
  sweep->add_option("--param", parameter, "Dotted parameter path, e.g. laser.input_power_mw")->required();
  sweep->add_option("--from", from, "First value")->required();
  sweep->add_option("--to", to, "Last value")->required();
  sweep->add_option("--steps", steps, "Number of values")->required();
  sweep->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto *angle = app.add_subcommand("angle-cal", "Homodyne angle from a local-oscillator offset sweep");
  add_common(angle, false, true);
  angle->add_option("input", input, "CSV with columns offset, high_frequency_psd")->required();

  auto *echo = app.add_subcommand("echo", "Print the fully resolved scenario");
  add_common(echo, true, false);
  echo->add_option("--format", common.format, "toml or json")->check(CLI::IsMember({"toml", "json"}));

  // Each command sets its own default format before parsing.
  sweep->preparse_callback([&](std::size_t) { common.format = "csv"; });
  echo->preparse_callback([&](std::size_t) { common.format = "toml"; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return exit_success;
  } catch (const CLI::CallForAllHelp &e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_success;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return exit_validation_error;
  }

  try {
    if (*synth) return cmd_synth(common, kind, noise, out);
    if (*budget) return cmd_budget(common, out);
    if (*fit) return cmd_fit(common, input, mode, temperature, calibration, out);
    if (*feas) return cmd_feasibility(common, out);
    if (*sweep) return cmd_sweep(common, parameter, from, to, steps, out);
    if (*angle) return cmd_angle_cal(common, input, out);
    if (*echo) return cmd_echo(common, out);
  } catch (const IoError &e) {
    err << "I/O error: " << e.what() << "\n";
    return exit_io_error;
  } catch (const ValidationError &e) {
    err << "validation error: " << e.what() << "\n";
    return exit_validation_error;
  } catch (const DegenerateDataError &e) {
    err << "degenerate data: " << e.what() << "\n";
    return exit_validation_error;
  } catch (const DomainError &e) {
    err << "invalid value: " << e.what() << "\n";
    return exit_validation_error;
  } catch (const std::exception &e) {
    err << "internal error: " << e.what() << "\n";
    return exit_internal_error;
  }
  return exit_internal_error;
}

} // namespace optomech::workbench
