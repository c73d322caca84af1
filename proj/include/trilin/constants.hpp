#pragma once

#include <numbers>

namespace trilin::constants {

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double epsilon0 = 8.8541878128e-12;  // F / m
inline constexpr double atomic_mass = 1.66053906660e-27;  // kg
inline constexpr double elementary_charge = 1.602176634e-19;  // C

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * pi;

// ordinary frequency in kHz <-> angular frequency in rad/s
inline constexpr double khz_to_rad(double f_khz) { return two_pi * 1.0e3 * f_khz; }
inline constexpr double rad_to_khz(double w) { return w / (two_pi * 1.0e3); }

}  // namespace trilin::constants
