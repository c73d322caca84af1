#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>

namespace trilin::modes {

// All frequencies in this library are angular (rad/s) unless a name says
// otherwise. Conversion from ordinary kHz happens once, at the config
// boundary.

struct TrapConfig {
  double mass = 0.0;     // kg
  double charge = 0.0;   // C,  nonzero
  double omega_x = 0.0;  // rad/s, radial
  double omega_y = 0.0;  // rad/s, radial
  double omega_z = 0.0;  // rad/s, axial, weakest

  // Throws ConfigError on nonpositive mass/frequencies, zero charge, or
  // omega_z >= min(omega_x, omega_y). Structural (zigzag) instability is
  // reported later, by normal_modes, as ComplexFrequency.
  void validate() const;
};

// One translational direction of the three-ion crystal: center of mass,
// tilt, zigzag, in that order.
struct AxisModes {
  std::array<double, 3> frequency{};          // rad/s
  std::array<Eigen::Vector3d, 3> vector{};    // unit participation vectors
};

struct ModeTable {
  AxisModes axial;     // along z: omega_z, sqrt(3) omega_z, sqrt(29/5) omega_z
  AxisModes radial_x;  // descending frequency: com, tilt, zigzag
  AxisModes radial_y;
};

// Equilibrium spacing between neighbouring ions in the three-ion chain,
//   d = (5 q^2 / (16 pi eps0 m omega_z^2))^(1/3).
double ion_spacing(const TrapConfig& trap);

// Small-oscillation normal modes about the linear crystal. Radial branch
// frequencies are sqrt(omega_r^2), sqrt(omega_r^2 - omega_z^2),
// sqrt(omega_r^2 - 12 omega_z^2 / 5); a negative argument means the crystal
// buckles and raises ComplexFrequency naming the offending mode.
ModeTable normal_modes(const TrapConfig& trap);

// Root r* of  sqrt(29/5) r = sqrt(1 - r^2) + sqrt(1 - 12 r^2 / 5)  in
// (0, sqrt(5/12)): the axial-to-radial ratio at which the axial zigzag is
// resonant with the sum of radial-x tilt and zigzag. Bisection to 1e-12
// relative bracket width, then one Newton polish.
double resonance_ratio();

// Trilinear coupling rate between the axial zigzag (a), radial-x tilt (b)
// and radial-x zigzag (c):
//   xi = 9 omega_z^2 sqrt(hbar / (m omega_a omega_b omega_c)) / (5 d).
double coupling_rate(const TrapConfig& trap, const ModeTable& table);

// The three coupled modes plus derived quantities, ready for dynamics.
struct ModeSystem {
  double omega_a = 0.0;  // axial zigzag
  double omega_b = 0.0;  // radial-x tilt
  double omega_c = 0.0;  // radial-x zigzag
  double delta = 0.0;    // omega_a - omega_b - omega_c, recomputed from the above
  double xi = 0.0;       // rad/s, > 0
  double spacing = 0.0;  // m
};

// Assembles the mode system from trap settings. With delta_override present,
// omega_b is shifted to omega_a - omega_c - delta_override (modelling a bias
// field that tunes the tilt), and xi is recomputed from the shifted
// frequencies. delta is always recomputed from the stored frequencies.
ModeSystem build_mode_system(const TrapConfig& trap,
                             std::optional<double> delta_override = std::nullopt);

}  // namespace trilin::modes
