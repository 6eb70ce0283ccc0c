#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace optomech {

/// Log-spaced base grid with linear refinement around the mechanical line.
struct GridSpec {
  double start_hz = 0.0;
  double stop_hz = 0.0;
  std::size_t log_points = 2001;
  // Fine zone: ±refine_linewidths·(f_M/Q) with refine_points samples.
  double refine_linewidths = 20.0;
  std::size_t refine_points = 401;
  // Optional medium zone ±wing_half_width_hz, for spectra whose features are wider than the line.
  double wing_half_width_hz = 0.0;
  std::size_t wing_points = 0;

  void validate() const;

  bool operator==(const GridSpec &) const = default;
};

/// Sorted, strictly increasing union of the zones. Points closer than 1e-9 relative are merged.
std::vector<double> make_frequency_grid(const GridSpec &spec, double resonance_hz, double linewidth_hz);

/// Throws ValidationError unless the grid is non-empty, positive and strictly increasing.
void require_valid_grid(std::span<const double> frequency_hz);

} // namespace optomech
