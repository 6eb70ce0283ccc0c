#pragma once

#include <numbers>

// CODATA 2018 values. Not configurable.
namespace optomech::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double speed_of_light = 299'792'458.0;   // m/s (exact)
inline constexpr double planck_reduced = 1.054571817e-34; // J s
inline constexpr double boltzmann = 1.380649e-23;         // J/K (exact)

} // namespace optomech::constants
