#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "trilin/dynamics.hpp"
#include "trilin/hilbert.hpp"
#include "trilin/modes.hpp"

namespace trilin::scenarios {

// Reference trap: three 171Yb+ ions at (omega_x, omega_y, omega_z) =
// 2 pi x (1056, 976, 587) kHz.
modes::TrapConfig default_trap();

// Common knobs; each run_* fills scenario-appropriate defaults for anything
// left unset.
struct ScenarioBase {
  modes::TrapConfig trap = default_trap();
  std::optional<hilbert::Truncation> truncation;  // scenario default if unset
  double delta_park = 0.0;  // rad/s; 0 means the default -2 pi x 44 kHz
  dynamics::Propagator propagator;
};

struct AvoidedCrossingConfig : ScenarioBase {
  double half_span_xi = 10.0;  // scan delta in [-half_span_xi, +half_span_xi] * xi
  int points = 201;
};

struct AvoidedCrossingRow {
  double delta = 0.0;        // rad/s
  double lower = 0.0;        // eigenvalues of the (1,1) block, ascending
  double upper = 0.0;
  double gap = 0.0;
  double probe_lower = 0.0;  // dressed-line offsets from the bare omega_a probe
  double probe_upper = 0.0;
};

struct AvoidedCrossingResult {
  modes::ModeSystem system;  // resonant system; xi held fixed over the scan
  std::vector<AvoidedCrossingRow> rows;
};

// Spectroscopy of the hybridized single-excitation states against detuning:
// the two-branch avoided crossing with minimum splitting 2 xi.
AvoidedCrossingResult run_avoided_crossing(const AvoidedCrossingConfig& cfg);

// Time series of everything observable about a quench-and-hold run.
struct EvolutionRecord {
  std::vector<double> times;   // s
  std::vector<double> xi_tau;  // dimensionless hold time
  std::vector<std::array<hilbert::PhononDistribution, 3>> distributions;  // a,b,c
  std::vector<std::array<double, 3>> means;
  std::vector<std::vector<double>> sector_weights;
  std::vector<double> leakage;  // initial-state truncation loss, per row
  bool leakage_flagged = false; // any row above 1e-6
};

struct ExchangeConfig : ScenarioBase {
  double tau_max = -1.0;  // s; < 0 means 3 full population cycles, 3 pi / xi
  int points = 601;
};

struct ExchangeResult {
  modes::ModeSystem system;
  EvolutionRecord record;
};

// Single axial quantum against the vacuum: |100> converting to |011> and
// back at population frequency xi / pi.
ExchangeResult run_energy_exchange(const ExchangeConfig& cfg);

struct JaynesCummingsConfig : ScenarioBase {
  enum class Initial { fock, coherent };
  Initial initial = Initial::fock;
  int fock_n = 0;      // fock: start |1, 0, n>
  double nbar = 1.8;   // coherent: start |1, 0, alpha>, alpha = sqrt(nbar)
  double xi_tau_max = -1.0;  // < 0: fock -> 3 cycles of Omega_n; coherent -> 16
  int points = -1;           // < 0: 601 (fock) or 3201 (coherent)
};

struct JaynesCummingsResult {
  modes::ModeSystem system;
  EvolutionRecord record;
  // Fock runs only: exchange frequency from a deterministic sinusoid fit of
  // mean n_a, and the closed-form 2 sqrt(n+1) xi it should reproduce.
  std::optional<double> fitted_omega;
  std::optional<double> theory_omega;
};

// The two-level limit: mode a + b form the spin, mode c the field. Fock
// field states flop at Omega_n = 2 sqrt(n+1) xi; a coherent field collapses
// and revives.
JaynesCummingsResult run_jaynes_cummings(const JaynesCummingsConfig& cfg);

struct PdcConfig : ScenarioBase {
  double nbar = 3.7;  // pump coherent amplitude squared
  double xi_tau_max = 3.0;
  int points = 31;
};

struct PdcResult {
  modes::ModeSystem system;
  EvolutionRecord record;
  std::vector<double> geometric_residual_b;  // thermality of the daughters
  std::vector<double> geometric_residual_c;
};

// Parametric down-conversion with a pump small enough to deplete: daughters
// start thermal-like, then depart as the pump drains.
PdcResult run_pdc_depleted(const PdcConfig& cfg);

namespace detail {
// Least-squares frequency of v(t) ~= A cos(omega t) + C by deterministic
// grid refinement around omega_guess (no iterative solver to go astray).
double fit_cosine_frequency(std::span<const double> times,
                            std::span<const double> values, double omega_guess);
}  // namespace detail

}  // namespace trilin::scenarios
