#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "trilin/dynamics.hpp"
#include "trilin/errors.hpp"
#include "trilin/hilbert.hpp"

using namespace trilin;
using namespace trilin::hilbert;
using namespace trilin::dynamics;

namespace {

Truncation cube(int n) {
  Truncation t;
  t.n_max_a = t.n_max_b = t.n_max_c = n;
  return t;
}

StateVector random_state(std::shared_ptr<const SectorBasis> basis,
                         std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<std::complex<double>> amps(basis->dimension());
  for (auto& a : amps) a = {gauss(rng), gauss(rng)};
  return StateVector(basis, std::move(amps)).normalized();
}

double fidelity(const StateVector& x, const StateVector& y) {
  std::complex<double> dot = 0.0;
  auto xa = x.amplitudes();
  auto ya = y.amplitudes();
  for (std::size_t i = 0; i < xa.size(); ++i) dot += std::conj(xa[i]) * ya[i];
  return std::abs(dot);
}

double max_amp_diff(const StateVector& x, const StateVector& y) {
  double m = 0.0;
  auto xa = x.amplitudes();
  auto ya = y.amplitudes();
  for (std::size_t i = 0; i < xa.size(); ++i)
    m = std::max(m, std::abs(xa[i] - ya[i]));
  return m;
}

}  // namespace

TEST_CASE("single-excitation block is the textbook two-level matrix") {
  auto basis = SectorBasis::build(cube(1));
  double xi = 1.3, delta = 0.7;
  auto h = HamiltonianOp::trilinear(basis, xi, delta);
  auto s = *basis->find_sector({1, 1});

  auto diag = h.diagonal(s);
  auto sub = h.subdiagonal(s);
  REQUIRE(diag.size() == 2);
  REQUIRE(sub.size() == 1);
  // ordering is |100>, |011>: diagonal (delta, 0), coupling xi
  CHECK(diag[0] == doctest::Approx(delta).epsilon(1e-15));
  CHECK(diag[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sub[0] == doctest::Approx(xi).epsilon(1e-15));

  auto dense = h.dense_block(s);
  CHECK(dense(0, 0) == doctest::Approx(delta));
  CHECK(dense(0, 1) == doctest::Approx(xi));
  CHECK(dense(1, 0) == doctest::Approx(xi));
  CHECK(dense(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("two-excitation block carries sqrt-weighted couplings") {
  auto basis = SectorBasis::build(cube(2));
  double xi = 0.9;
  auto h = HamiltonianOp::trilinear(basis, xi, 0.0);
  auto s = *basis->find_sector({2, 2});
  // kets |200>, |111>, |022>; <2,0,0|H|1,1,1> = xi sqrt(2*1*1),
  // <1,1,1|H|0,2,2> = xi sqrt(1*2*2)
  auto sub = h.subdiagonal(s);
  REQUIRE(sub.size() == 2);
  CHECK(sub[0] == doctest::Approx(xi * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sub[1] == doctest::Approx(xi * 2.0).epsilon(1e-15));
}

TEST_CASE("blocked operator equals the ladder-built operator") {
  auto basis = SectorBasis::build(cube(3));
  double xi = 0.8, delta = 0.45;
  auto h = HamiltonianOp::trilinear(basis, xi, delta);
  auto n = basis->dimension();

  // columns of H via ladder composition: H = delta na + xi (a'bc + a b'c')
  for (std::int64_t j = 0; j < n; ++j) {
    std::vector<std::complex<double>> e(n, 0.0);
    e[j] = 1.0;
    StateVector col(basis, e);

    auto up = apply_ladder(apply_ladder(apply_ladder(col, Mode::c, Ladder::lower),
                                        Mode::b, Ladder::lower),
                           Mode::a, Ladder::raise);
    auto down = apply_ladder(apply_ladder(apply_ladder(col, Mode::c, Ladder::raise),
                                          Mode::b, Ladder::raise),
                             Mode::a, Ladder::lower);
    Ket k = basis->ket_at(j);
    std::vector<std::complex<double>> want(n, 0.0);
    for (std::int64_t i = 0; i < n; ++i)
      want[i] = xi * (up.amplitudes()[i] + down.amplitudes()[i]);
    want[j] += delta * k.na;

    auto got = h.apply(col.amplitudes());
    for (std::int64_t i = 0; i < n; ++i)
      CHECK(std::abs(got[i] - want[i]) < 1e-13);
  }
}

TEST_CASE("beam-splitter form shares off-diagonals, shifts diagonals per sector") {
  auto basis = SectorBasis::build(cube(3));
  double xi = 1.1, wc = 2.9;
  auto tri = HamiltonianOp::trilinear(basis, xi, 0.0);
  auto tc = HamiltonianOp::tavis_cummings(basis, xi, wc);

  for (std::size_t s = 0; s < basis->sector_count(); ++s) {
    auto sub_t = tri.subdiagonal(s);
    auto sub_c = tc.subdiagonal(s);
    REQUIRE(sub_t.size() == sub_c.size());
    for (std::size_t k = 0; k < sub_t.size(); ++k)
      CHECK(sub_t[k] == doctest::Approx(sub_c[k]).epsilon(1e-15));

    // the diagonal difference is constant within the sector
    auto d_t = tri.diagonal(s);
    auto d_c = tc.diagonal(s);
    for (std::size_t k = 0; k < d_t.size(); ++k) {
      Ket ket = basis->ket_at(basis->sector(s).first + k);
      CHECK(d_c[k] == doctest::Approx(wc * (ket.nc + 0.5 * (ket.na - ket.nb - 1)))
                          .epsilon(1e-14));
      if (k > 0)
        CHECK(d_c[k] - d_t[k] == doctest::Approx(d_c[0] - d_t[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("per-sector spectra of the two forms agree after mean alignment") {
  auto basis = SectorBasis::build(cube(4));
  double xi = 1.0;
  auto tri = HamiltonianOp::trilinear(basis, xi, 0.0);
  auto tc = HamiltonianOp::tavis_cummings(basis, xi, 2.9);

  for (std::size_t s = 0; s < basis->sector_count(); ++s) {
    const auto& et = tri.eigensystem(s);
    const auto& ec = tc.eigensystem(s);
    double mt = et.values.mean();
    double mc = ec.values.mean();
    for (int i = 0; i < et.values.size(); ++i)
      CHECK(std::abs((et.values[i] - mt) - (ec.values[i] - mc)) < 1e-10);
  }
}

TEST_CASE("single-excitation spectrum and gap") {
  auto basis = SectorBasis::build(cube(1));
  double xi = 1.7;

  auto slice = sector_spectrum(HamiltonianOp::trilinear(basis, xi, 0.0), {1, 1});
  REQUIRE(slice.eigenvalues.size() == 2);
  CHECK(slice.eigenvalues[0] == doctest::Approx(-xi).epsilon(1e-14));
  CHECK(slice.eigenvalues[1] == doctest::Approx(xi).epsilon(1e-14));

  // at detuning delta the branches sit at (delta +- sqrt(delta^2 + 4 xi^2)) / 2
  for (double delta : {-4.0, -0.6, 0.3, 5.0}) {
    auto sl = sector_spectrum(HamiltonianOp::trilinear(basis, xi, delta), {1, 1});
    double root = std::sqrt(delta * delta + 4.0 * xi * xi);
    CHECK(sl.eigenvalues[0] == doctest::Approx(0.5 * (delta - root)).epsilon(1e-13));
    CHECK(sl.eigenvalues[1] == doctest::Approx(0.5 * (delta + root)).epsilon(1e-13));
  }

  CHECK_THROWS_AS(
      sector_spectrum(HamiltonianOp::trilinear(basis, xi, 0.0), {7, 7}),
      ConfigError);
}

TEST_CASE("avoided crossing scan is symmetric with minimum gap 2 xi") {
  auto basis = SectorBasis::build(cube(1));
  double xi = 2.2;
  std::vector<double> deltas;
  for (int i = -10; i <= 10; ++i) deltas.push_back(xi * i / 2.0);

  auto slices = avoided_crossing_scan(basis, xi, deltas);
  REQUIRE(slices.size() == deltas.size());
  double min_gap = 1e300;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    double gap = slices[i].eigenvalues[1] - slices[i].eigenvalues[0];
    min_gap = std::min(min_gap, gap);
    double mirror = slices[slices.size() - 1 - i].eigenvalues[1] -
                    slices[slices.size() - 1 - i].eigenvalues[0];
    CHECK(gap == doctest::Approx(mirror).epsilon(1e-12));
    CHECK(gap == doctest::Approx(std::sqrt(deltas[i] * deltas[i] + 4 * xi * xi))
                     .epsilon(1e-12));
  }
  CHECK(min_gap == doctest::Approx(2.0 * xi).epsilon(1e-13));
}

TEST_CASE("single-quantum exchange oscillates at cos^2(xi t)") {
  auto basis = SectorBasis::build(cube(1));
  double xi = 1.0;
  auto h = HamiltonianOp::trilinear(basis, xi, 0.0);
  auto psi0 = fock_state(basis, Ket{1, 0, 0});
  auto i100 = *basis->index_of(Ket{1, 0, 0});
  auto i011 = *basis->index_of(Ket{0, 1, 1});

  for (double t : {0.3, 1.1, 2.0, 4.7}) {
    auto psi = evolve(h, psi0, t);
    double c = std::cos(xi * t), s = std::sin(xi * t);
    CHECK(std::norm(psi.amplitudes()[i100]) == doctest::Approx(c * c).epsilon(1e-12));
    CHECK(std::norm(psi.amplitudes()[i011]) == doctest::Approx(s * s).epsilon(1e-12));
  }
}

TEST_CASE("dense evolution: unitarity, sector confinement, energy conservation") {
  auto basis = SectorBasis::build(cube(3));
  auto h = HamiltonianOp::trilinear(basis, 1.0, 0.37);
  std::mt19937_64 rng(7);
  auto psi0 = random_state(basis, rng);
  auto w0 = psi0.sector_weights();
  double e0 = h.expectation(psi0);

  auto psi = evolve(h, psi0, 2.31);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  auto w = psi.sector_weights();
  for (std::size_t s = 0; s < w.size(); ++s) CHECK(std::abs(w[s] - w0[s]) < 1e-12);
  CHECK(std::abs(h.expectation(psi) - e0) < 1e-12);
}

TEST_CASE("evolution composes and inverts") {
  auto basis = SectorBasis::build(cube(2));
  auto h = HamiltonianOp::trilinear(basis, 0.8, -0.2);
  std::mt19937_64 rng(11);
  auto psi0 = random_state(basis, rng);

  auto once = evolve(h, evolve(h, psi0, 0.7), 1.4);
  auto direct = evolve(h, psi0, 2.1);
  CHECK(max_amp_diff(once, direct) < 1e-9);

  auto back = evolve(h, direct, -2.1);
  CHECK(fidelity(back, psi0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("resonant spectrum is symmetric about zero") {
  auto basis = SectorBasis::build(cube(3));
  auto h = HamiltonianOp::trilinear(basis, 1.0, 0.0);
  for (std::size_t s = 0; s < basis->sector_count(); ++s) {
    const auto& eig = h.eigensystem(s);
    int n = int(eig.values.size());
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(eig.values[i] + eig.values[n - 1 - i]) < 1e-12);
  }
}

TEST_CASE("krylov agrees with dense on every sector") {
  auto basis = SectorBasis::build(cube(4));
  auto h = HamiltonianOp::trilinear(basis, 1.0, 0.3);
  std::mt19937_64 rng(23);
  auto psi0 = random_state(basis, rng);

  Propagator dense;
  Propagator krylov;
  krylov.method = Propagator::Method::krylov;
  krylov.tol = 1e-10;

  for (double t : {0.5, 3.0}) {
    auto a = evolve(h, psi0, t, dense);
    auto b = evolve(h, psi0, t, krylov);
    CHECK(max_amp_diff(a, b) < 1e-8);
  }
}

TEST_CASE("krylov handles a long integration by substepping") {
  auto basis = SectorBasis::build(cube(4));
  auto h = HamiltonianOp::trilinear(basis, 1.0, 0.0);
  auto psi0 = fock_state(basis, Ket{4, 0, 0});

  Propagator krylov;
  krylov.method = Propagator::Method::krylov;
  auto a = evolve(h, psi0, 50.0, krylov);
  auto b = evolve(h, psi0, 50.0);
  CHECK(max_amp_diff(a, b) < 1e-7);
  CHECK(std::abs(a.norm() - 1.0) < 1e-10);
}

TEST_CASE("krylov step control gives up when the budget is unreachable") {
  // a sector of dimension 40 with a 2-vector subspace and an absurd budget
  auto basis = SectorBasis::build_sectors(cube(39), {{39, 39}});
  REQUIRE(basis->dimension() == 40);
  auto h = HamiltonianOp::trilinear(basis, 1.0, 0.0);
  std::mt19937_64 rng(5);
  auto psi0 = random_state(basis, rng);

  Propagator bad;
  bad.method = Propagator::Method::krylov;
  bad.tol = 1e-18;
  bad.max_krylov_dim = 2;
  CHECK_THROWS_AS(evolve(h, psi0, 100.0, bad), ConvergenceFailure);
}

TEST_CASE("evolve refuses a state from a different basis") {
  auto b1 = SectorBasis::build(cube(2));
  auto b2 = SectorBasis::build(cube(2));
  auto h = HamiltonianOp::trilinear(b1, 1.0, 0.0);
  auto psi = fock_state(b2, Ket{1, 0, 0});
  CHECK_THROWS_AS(evolve(h, psi, 1.0), ConfigError);
}

TEST_CASE("quench schedule reduces to the resonant hold") {
  auto basis = SectorBasis::build(cube(1));
  double xi = 1.0;
  auto far = HamiltonianOp::trilinear(basis, xi, -44.0);
  auto res = HamiltonianOp::trilinear(basis, xi, 0.0);
  auto psi0 = fock_state(basis, Ket{1, 0, 0});

  auto half = quench_schedule(far, res, psi0, 0.5 * M_PI / xi);
  auto d_half = populations(half, Mode::a);
  CHECK(d_half.p[1] < 1e-12);
  CHECK(populations(half, Mode::b).p[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(populations(half, Mode::c).p[1] == doctest::Approx(1.0).epsilon(1e-12));

  auto full = quench_schedule(far, res, psi0, M_PI / xi);
  CHECK(populations(full, Mode::a).p[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigensystem sign convention is deterministic") {
  auto basis = SectorBasis::build(cube(2));
  auto h1 = HamiltonianOp::trilinear(basis, 1.0, 0.5);
  auto h2 = HamiltonianOp::trilinear(basis, 1.0, 0.5);
  for (std::size_t s = 0; s < basis->sector_count(); ++s) {
    const auto& a = h1.eigensystem(s);
    const auto& b = h2.eigensystem(s);
    CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
    for (int c = 0; c < a.vectors.cols(); ++c) {
      for (int r = 0; r < a.vectors.rows(); ++r) {
        if (std::abs(a.vectors(r, c)) > 1e-12) {
          CHECK(a.vectors(r, c) > 0.0);
          break;
        }
      }
    }
  }
}
