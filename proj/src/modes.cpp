#include "trilin/modes.hpp"

#include <cmath>
#include <sstream>

#include "trilin/constants.hpp"
#include "trilin/errors.hpp"

namespace trilin::modes {

namespace {

constexpr double kAxialTilt2 = 3.0;        // (omega / omega_z)^2, axial tilt
constexpr double kAxialZigzag2 = 29.0 / 5.0;
constexpr double kRadialZigzagShift2 = 12.0 / 5.0;  // subtracted in units of omega_z^2

Eigen::Vector3d com_vector() { return Eigen::Vector3d(1, 1, 1) / std::sqrt(3.0); }
Eigen::Vector3d tilt_vector() { return Eigen::Vector3d(-1, 0, 1) / std::sqrt(2.0); }
Eigen::Vector3d zigzag_vector() { return Eigen::Vector3d(-1, 2, -1) / std::sqrt(6.0); }

AxisModes radial_axis(double omega_r, double omega_z, const char* axis_name) {
  double tilt2 = omega_r * omega_r - omega_z * omega_z;
  double zig2 = omega_r * omega_r - kRadialZigzagShift2 * omega_z * omega_z;
  if (zig2 <= 0.0) {
    std::ostringstream msg;
    msg << "radial-" << axis_name << " zigzag mode frequency is imaginary: "
        << "omega_" << axis_name << "^2 - 12 omega_z^2 / 5 = " << zig2
        << " (rad/s)^2; the linear crystal is unstable at these settings";
    throw ComplexFrequency(msg.str());
  }
  if (tilt2 <= 0.0) {
    std::ostringstream msg;
    msg << "radial-" << axis_name << " tilt mode frequency is imaginary: "
        << "omega_" << axis_name << "^2 - omega_z^2 = " << tilt2 << " (rad/s)^2";
    throw ComplexFrequency(msg.str());
  }
  AxisModes axis;
  axis.frequency = {omega_r, std::sqrt(tilt2), std::sqrt(zig2)};
  axis.vector = {com_vector(), tilt_vector(), zigzag_vector()};
  return axis;
}

double coupling_from_frequencies(double mass, double omega_z, double spacing,
                                 double omega_a, double omega_b, double omega_c) {
  if (omega_a <= 0.0 || omega_b <= 0.0 || omega_c <= 0.0)
    throw ConfigError("coupling rate needs positive mode frequencies");
  double zpf = std::sqrt(constants::hbar / (mass * omega_a * omega_b * omega_c));
  return 9.0 * omega_z * omega_z * zpf / (5.0 * spacing);
}

}  // namespace

void TrapConfig::validate() const {
  if (!(mass > 0.0)) throw ConfigError("trap: mass must be positive");
  if (charge == 0.0) throw ConfigError("trap: charge must be nonzero");
  if (!(omega_x > 0.0 && omega_y > 0.0 && omega_z > 0.0))
    throw ConfigError("trap: all trap frequencies must be positive");
  if (!(omega_z < omega_x && omega_z < omega_y))
    throw ConfigError("trap: omega_z must be the weakest axis for a linear crystal");
}

double ion_spacing(const TrapConfig& trap) {
  trap.validate();
  double num = 5.0 * trap.charge * trap.charge;
  double den = 16.0 * constants::pi * constants::epsilon0 * trap.mass *
               trap.omega_z * trap.omega_z;
  return std::cbrt(num / den);
}

ModeTable normal_modes(const TrapConfig& trap) {
  trap.validate();
  ModeTable table;
  table.axial.frequency = {trap.omega_z, std::sqrt(kAxialTilt2) * trap.omega_z,
                           std::sqrt(kAxialZigzag2) * trap.omega_z};
  table.axial.vector = {com_vector(), tilt_vector(), zigzag_vector()};
  table.radial_x = radial_axis(trap.omega_x, trap.omega_z, "x");
  table.radial_y = radial_axis(trap.omega_y, trap.omega_z, "y");
  return table;
}

double resonance_ratio() {
  // f(r) = sqrt(29/5) r - sqrt(1 - r^2) - sqrt(1 - 12 r^2 / 5), increasing
  // on the bracket; the upper end is where the radial zigzag goes soft.
  auto f = [](double r) {
    double zig2 = std::max(0.0, 1.0 - kRadialZigzagShift2 * r * r);
    return std::sqrt(kAxialZigzag2) * r - std::sqrt(1.0 - r * r) - std::sqrt(zig2);
  };
  double lo = 1.0e-9;
  double hi = std::sqrt(5.0 / 12.0) * (1.0 - 1.0e-12);
  if (!(f(lo) < 0.0 && f(hi) > 0.0))
    throw ConvergenceFailure("resonance ratio: bracket does not straddle the root");
  while (hi - lo > 1.0e-12 * hi) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  double df = std::sqrt(kAxialZigzag2) + r / std::sqrt(1.0 - r * r) +
              kRadialZigzagShift2 * r / std::sqrt(1.0 - kRadialZigzagShift2 * r * r);
  return r - f(r) / df;
}

double coupling_rate(const TrapConfig& trap, const ModeTable& table) {
  trap.validate();
  return coupling_from_frequencies(trap.mass, trap.omega_z, ion_spacing(trap),
                                   table.axial.frequency[2],
                                   table.radial_x.frequency[1],
                                   table.radial_x.frequency[2]);
}

ModeSystem build_mode_system(const TrapConfig& trap,
                             std::optional<double> delta_override) {
  ModeTable table = normal_modes(trap);
  ModeSystem sys;
  sys.omega_a = table.axial.frequency[2];
  sys.omega_b = table.radial_x.frequency[1];
  sys.omega_c = table.radial_x.frequency[2];
  sys.spacing = ion_spacing(trap);
  if (delta_override) {
    double shifted = sys.omega_a - sys.omega_c - *delta_override;
    if (!(shifted > 0.0))
      throw ConfigError("delta override pushes the tilt mode to a nonpositive frequency");
    sys.omega_b = shifted;
  }
  sys.delta = sys.omega_a - sys.omega_b - sys.omega_c;
  sys.xi = coupling_from_frequencies(trap.mass, trap.omega_z, sys.spacing,
                                     sys.omega_a, sys.omega_b, sys.omega_c);
  return sys;
}

}  // namespace trilin::modes
