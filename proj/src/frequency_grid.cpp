#include "optomech/frequency_grid.hpp"

#include <algorithm>
#include <cmath>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

void append_linear(std::vector<double> &out, double lo, double hi, std::size_t n) {
  if (n == 0) {
    return;
  }
  if (n == 1) {
    out.push_back(0.5 * (lo + hi));
    return;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(lo + step * static_cast<double>(i));
  }
}

} // namespace

void GridSpec::validate() const {
  if (!(start_hz > 0.0) || !std::isfinite(start_hz)) {
    throw ValidationError("grid.start_hz", "must be finite and > 0");
  }
  if (!(stop_hz > start_hz) || !std::isfinite(stop_hz)) {
    throw ValidationError("grid.stop_hz", "must be finite and > start_hz");
  }
  if (log_points < 2) {
    throw ValidationError("grid.log_points", "must be >= 2");
  }
  if (!(refine_linewidths >= 0.0)) {
    throw ValidationError("grid.refine_linewidths", "must be >= 0");
  }
  if (!(wing_half_width_hz >= 0.0)) {
    throw ValidationError("grid.wing_half_width_hz", "must be >= 0");
  }
}

std::vector<double> make_frequency_grid(const GridSpec &spec, double resonance_hz, double linewidth_hz) {
  spec.validate();
  std::vector<double> f;
  f.reserve(spec.log_points + spec.refine_points + spec.wing_points);

  const double log_lo = std::log(spec.start_hz);
  const double log_step = (std::log(spec.stop_hz) - log_lo) / static_cast<double>(spec.log_points - 1);
  for (std::size_t i = 0; i < spec.log_points; ++i) {
    f.push_back(std::exp(log_lo + log_step * static_cast<double>(i)));
  }
  f.front() = spec.start_hz;
  f.back() = spec.stop_hz;

  const double half = spec.refine_linewidths * linewidth_hz;
  append_linear(f, resonance_hz - half, resonance_hz + half, spec.refine_points);
  append_linear(f, resonance_hz - spec.wing_half_width_hz, resonance_hz + spec.wing_half_width_hz,
                spec.wing_points);

  std::erase_if(f, [&](double v) { return v < spec.start_hz || v > spec.stop_hz; });
  std::sort(f.begin(), f.end());
  auto last = std::unique(f.begin(), f.end(), [](double a, double b) { return b - a <= 1e-9 * b; });
  f.erase(last, f.end());
  return f;
}

void require_valid_grid(std::span<const double> frequency_hz) {
  if (frequency_hz.empty()) {
    throw ValidationError("grid", "frequency grid is empty");
  }
  if (!(frequency_hz.front() > 0.0)) {
    throw ValidationError("grid", "frequencies must be > 0");
  }
  for (std::size_t i = 1; i < frequency_hz.size(); ++i) {
    if (!(frequency_hz[i] > frequency_hz[i - 1])) {
      throw ValidationError("grid", "frequencies must be strictly increasing");
    }
  }
}

} // namespace optomech
