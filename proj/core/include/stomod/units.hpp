#pragma once

#include <numbers>

namespace stomod {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Internal math is in rad/s; files and the CLI speak Hz.
[[nodiscard]] constexpr double to_hz(double omega_rad_s) noexcept { return omega_rad_s / kTwoPi; }
[[nodiscard]] constexpr double to_rad_s(double f_hz) noexcept { return f_hz * kTwoPi; }

}  // namespace stomod
