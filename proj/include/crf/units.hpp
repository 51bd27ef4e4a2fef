#pragma once
#include <numbers>

namespace crf {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// All frequencies inside the library are angular (rad/s). The JSON/CLI
// boundary uses the "2pi_hz" convention: the serialized number is the
// ordinary frequency in Hz, i.e. the internal value divided by 2*pi.
constexpr double from_2pi_hz(double f_hz) { return two_pi * f_hz; }
constexpr double to_2pi_hz(double w_rad_per_s) { return w_rad_per_s / two_pi; }

} // namespace crf
