#pragma once

#include <numbers>

// Internal unit convention: time in microseconds, every frequency as an
// angular frequency in rad/us. A lab value quoted as "2pi x f MHz" is
// 2*pi*f rad/us.
namespace rydsim {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double from_2pi_mhz(double f_mhz) { return two_pi * f_mhz; }
constexpr double to_2pi_mhz(double rad_per_us) { return rad_per_us / two_pi; }

// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

}  // namespace rydsim
