#include "trilin/scenarios.hpp"

#include <cmath>

#include "trilin/constants.hpp"
#include "trilin/errors.hpp"
#include "trilin/observe.hpp"
#include "trilin/parallel.hpp"

namespace trilin::scenarios {

using constants::khz_to_rad;
using dynamics::HamiltonianOp;
using hilbert::Mode;
using hilbert::SectorBasis;
using hilbert::StateVector;
using hilbert::Truncation;

namespace {

constexpr double kDefaultParkKhz = -44.0;

double resolved_park(const ScenarioBase& cfg) {
  return cfg.delta_park != 0.0 ? cfg.delta_park : khz_to_rad(kDefaultParkKhz);
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2) throw ConfigError("grid needs at least 2 points");
  std::vector<double> g(points);
  double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = lo + step * i;
  return g;
}

// Run the quench-and-hold protocol for every hold time and collect the
// full observable record. Rows are written to preallocated slots, so the
// parallel fan-out is deterministic.
EvolutionRecord evolve_record(const HamiltonianOp& h_far, const HamiltonianOp& h_res,
                              const StateVector& psi0, std::vector<double> times,
                              double xi, const dynamics::Propagator& prop) {
  EvolutionRecord rec;
  rec.times = std::move(times);
  std::size_t n = rec.times.size();
  rec.xi_tau.resize(n);
  rec.distributions.resize(n);
  rec.means.resize(n);
  rec.sector_weights.resize(n);
  rec.leakage.resize(n);

  h_res.precompute_eigensystems();
  parallel::parallel_for(std::int64_t(n), [&](std::int64_t i) {
    StateVector psi = dynamics::quench_schedule(h_far, h_res, psi0,
                                                rec.times[i], prop);
    rec.xi_tau[i] = xi * rec.times[i];
    for (Mode m : {Mode::a, Mode::b, Mode::c}) {
      auto dist = hilbert::populations(psi, m);
      rec.means[i][int(m)] = dist.mean;
      rec.distributions[i][int(m)] = std::move(dist);
    }
    rec.sector_weights[i] = psi.sector_weights();
    rec.leakage[i] = psi.leaked_weight();
  });

  for (double leak : rec.leakage)
    if (leak > 1.0e-6) rec.leakage_flagged = true;
  return rec;
}

}  // namespace

modes::TrapConfig default_trap() {
  modes::TrapConfig trap;
  trap.mass = 171.0 * constants::atomic_mass;
  trap.charge = constants::elementary_charge;
  trap.omega_x = khz_to_rad(1056.0);
  trap.omega_y = khz_to_rad(976.0);
  trap.omega_z = khz_to_rad(587.0);
  return trap;
}

AvoidedCrossingResult run_avoided_crossing(const AvoidedCrossingConfig& cfg) {
  if (!(cfg.half_span_xi > 0.0))
    throw ConfigError("avoided crossing: scan span must be positive");
  AvoidedCrossingResult res;
  res.system = modes::build_mode_system(cfg.trap, 0.0);
  double xi = res.system.xi;

  Truncation trunc = cfg.truncation.value_or(Truncation{1, 1, 1});
  auto basis = SectorBasis::build(trunc);

  std::vector<double> deltas =
      linspace(-cfg.half_span_xi * xi, cfg.half_span_xi * xi, cfg.points);
  auto slices = dynamics::avoided_crossing_scan(basis, xi, deltas);

  res.rows.resize(slices.size());
  for (std::size_t i = 0; i < slices.size(); ++i) {
    AvoidedCrossingRow& row = res.rows[i];
    row.delta = deltas[i];
    row.lower = slices[i].eigenvalues[0];
    row.upper = slices[i].eigenvalues[1];
    row.gap = row.upper - row.lower;
    // In the lab frame the sector energies are (omega_a - delta) + lambda;
    // a probe from the ground state meets the dressed lines at offsets
    // lambda - delta from the bare omega_a.
    row.probe_lower = row.lower - deltas[i];
    row.probe_upper = row.upper - deltas[i];
  }
  return res;
}

ExchangeResult run_energy_exchange(const ExchangeConfig& cfg) {
  ExchangeResult res;
  res.system = modes::build_mode_system(cfg.trap, 0.0);
  double xi = res.system.xi;

  Truncation trunc = cfg.truncation.value_or(Truncation{10, 10, 10});
  auto basis = SectorBasis::build(trunc);
  StateVector psi0 = hilbert::fock_state(basis, {1, 0, 0});

  HamiltonianOp h_far = HamiltonianOp::trilinear(basis, xi, resolved_park(cfg));
  HamiltonianOp h_res = HamiltonianOp::trilinear(basis, xi, 0.0);

  double tau_max = cfg.tau_max > 0.0 ? cfg.tau_max : 3.0 * constants::pi / xi;
  res.record = evolve_record(h_far, h_res, psi0,
                             linspace(0.0, tau_max, cfg.points), xi,
                             cfg.propagator);
  return res;
}

JaynesCummingsResult run_jaynes_cummings(const JaynesCummingsConfig& cfg) {
  JaynesCummingsResult res;
  res.system = modes::build_mode_system(cfg.trap, 0.0);
  double xi = res.system.xi;
  bool fock = cfg.initial == JaynesCummingsConfig::Initial::fock;

  Truncation trunc = cfg.truncation.value_or(
      fock ? Truncation{10, 10, 10} : Truncation{10, 10, 25});
  auto basis = SectorBasis::build(trunc);

  StateVector psi0 =
      fock ? hilbert::fock_state(basis, {1, 0, cfg.fock_n})
           : hilbert::coherent_state(basis, Mode::c,
                                     std::sqrt(std::max(0.0, cfg.nbar)), {1, 0});

  HamiltonianOp h_far = HamiltonianOp::trilinear(basis, xi, resolved_park(cfg));
  HamiltonianOp h_res = HamiltonianOp::trilinear(basis, xi, 0.0);

  double omega_n = 2.0 * std::sqrt(double(cfg.fock_n + 1)) * xi;
  double xi_tau_max = cfg.xi_tau_max > 0.0
                          ? cfg.xi_tau_max
                          : (fock ? 3.0 * constants::pi / std::sqrt(double(cfg.fock_n + 1))
                                  : 16.0);
  int points = cfg.points > 0 ? cfg.points : (fock ? 601 : 3201);

  res.record = evolve_record(h_far, h_res, psi0,
                             linspace(0.0, xi_tau_max / xi, points), xi,
                             cfg.propagator);

  if (fock) {
    std::vector<double> na(res.record.times.size());
    for (std::size_t i = 0; i < na.size(); ++i) na[i] = res.record.means[i][0];
    res.theory_omega = omega_n;
    res.fitted_omega =
        detail::fit_cosine_frequency(res.record.times, na, omega_n);
  }
  return res;
}

PdcResult run_pdc_depleted(const PdcConfig& cfg) {
  if (!(cfg.nbar >= 0.0)) throw ConfigError("pdc: nbar must be nonnegative");
  PdcResult res;
  res.system = modes::build_mode_system(cfg.trap, 0.0);
  double xi = res.system.xi;

  Truncation trunc = cfg.truncation.value_or(Truncation{25, 25, 25});
  auto basis = SectorBasis::build(trunc);
  StateVector psi0 =
      hilbert::coherent_state(basis, Mode::a, std::sqrt(cfg.nbar), {0, 0});

  HamiltonianOp h_far = HamiltonianOp::trilinear(basis, xi, resolved_park(cfg));
  HamiltonianOp h_res = HamiltonianOp::trilinear(basis, xi, 0.0);

  if (!(cfg.xi_tau_max > 0.0)) throw ConfigError("pdc: xi_tau_max must be positive");
  res.record = evolve_record(h_far, h_res, psi0,
                             linspace(0.0, cfg.xi_tau_max / xi, cfg.points), xi,
                             cfg.propagator);

  std::size_t n = res.record.times.size();
  res.geometric_residual_b.resize(n);
  res.geometric_residual_c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.geometric_residual_b[i] =
        observe::fit_geometric(res.record.distributions[i][1]).residual_norm;
    res.geometric_residual_c[i] =
        observe::fit_geometric(res.record.distributions[i][2]).residual_norm;
  }
  return res;
}

namespace detail {

double fit_cosine_frequency(std::span<const double> times,
                            std::span<const double> values, double omega_guess) {
  if (times.size() != values.size() || times.size() < 4)
    throw ConfigError("cosine fit: need matching series with at least 4 points");
  if (!(omega_guess > 0.0)) throw ConfigError("cosine fit: guess must be positive");

  // SSE of the best A cos(omega t) + C at fixed omega, by 2x2 normal
  // equations.
  auto sse = [&](double omega) {
    double scc = 0.0, sc = 0.0, svc = 0.0, sv = 0.0, svv = 0.0;
    double n = double(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      double ct = std::cos(omega * times[i]);
      scc += ct * ct;
      sc += ct;
      svc += values[i] * ct;
      sv += values[i];
      svv += values[i] * values[i];
    }
    double det = scc * n - sc * sc;
    if (std::abs(det) < 1.0e-14 * n * n) return svv;  // degenerate omega
    double amp = (svc * n - sv * sc) / det;
    double off = (scc * sv - sc * svc) / det;
    return svv - 2.0 * (amp * svc + off * sv) + amp * amp * scc +
           2.0 * amp * off * sc + off * off * n;
  };

  double center = omega_guess, span = 0.1 * omega_guess;
  for (int round = 0; round < 3; ++round) {
    int steps = round == 0 ? 401 : 101;
    double best = center, best_sse = sse(center);
    for (int i = 0; i < steps; ++i) {
      double w = center - span + 2.0 * span * i / (steps - 1);
      if (w <= 0.0) continue;
      double s = sse(w);
      if (s < best_sse) {
        best_sse = s;
        best = w;
      }
    }
    center = best;
    span = 2.0 * span / (steps - 1) * 2.0;
  }
  return center;
}

}  // namespace detail

}  // namespace trilin::scenarios
