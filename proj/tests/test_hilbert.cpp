#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>
#include <string>

#include "trilin/errors.hpp"
#include "trilin/hilbert.hpp"

using namespace trilin;
using namespace trilin::hilbert;

namespace {

Truncation cube(int n) {
  Truncation t;
  t.n_max_a = t.n_max_b = t.n_max_c = n;
  return t;
}

}  // namespace

TEST_CASE("basis dimension is the truncated product") {
  CHECK(SectorBasis::build(cube(1))->dimension() == 8);
  CHECK(SectorBasis::build(cube(2))->dimension() == 27);

  Truncation t;
  t.n_max_a = 3;
  t.n_max_b = 1;
  t.n_max_c = 2;
  CHECK(SectorBasis::build(t)->dimension() == 4 * 2 * 3);
}

TEST_CASE("every occupation triple appears exactly once") {
  Truncation shapes[] = {cube(5), []{
    Truncation t;
    t.n_max_a = 3;
    t.n_max_b = 1;
    t.n_max_c = 2;
    return t;
  }()};
  for (const auto& trunc : shapes) {
    auto basis = SectorBasis::build(trunc);
    std::set<std::int64_t> seen;
    for (int na = 0; na <= trunc.n_max_a; ++na)
      for (int nb = 0; nb <= trunc.n_max_b; ++nb)
        for (int nc = 0; nc <= trunc.n_max_c; ++nc) {
          Ket k{na, nb, nc};
          auto idx = basis->index_of(k);
          REQUIRE(idx.has_value());
          CHECK(seen.insert(*idx).second);
          CHECK(basis->ket_at(*idx) == k);
        }
    CHECK(std::int64_t(seen.size()) == basis->dimension());
    CHECK(*seen.rbegin() == basis->dimension() - 1);
  }
}

TEST_CASE("sector layout: sorted labels, contiguous blocks, descending na") {
  auto basis = SectorBasis::build(cube(4));
  std::int64_t cursor = 0;
  SectorLabel prev{-1, -1};
  for (std::size_t s = 0; s < basis->sector_count(); ++s) {
    const Sector& sec = basis->sector(s);
    CHECK(prev < sec.label);
    prev = sec.label;
    CHECK(sec.first == cursor);
    cursor += sec.size;
    for (int k = 0; k < sec.size; ++k) {
      Ket ket = basis->ket_at(sec.first + k);
      CHECK(SectorBasis::label_of(ket) == sec.label);
      CHECK(ket.na == sec.na_hi - k);
      CHECK(basis->sector_of_index(sec.first + k) == s);
    }
  }
  CHECK(cursor == basis->dimension());
}

TEST_CASE("the single-excitation sector holds |100> and |011>") {
  auto basis = SectorBasis::build(cube(1));
  auto s = basis->find_sector({1, 1});
  REQUIRE(s.has_value());
  const Sector& sec = basis->sector(*s);
  CHECK(sec.size == 2);
  CHECK(basis->ket_at(sec.first) == Ket{1, 0, 0});
  CHECK(basis->ket_at(sec.first + 1) == Ket{0, 1, 1});
  CHECK_FALSE(basis->find_sector({9, 9}).has_value());
}

TEST_CASE("dimension cap refuses oversized bases") {
  Truncation t = cube(100);
  t.dimension_cap = 1000;  // 101^3 way past this
  CHECK_THROWS_AS(SectorBasis::build(t), DimensionCap);
}

TEST_CASE("restricted sector basis") {
  auto basis = SectorBasis::build_sectors(cube(1), {{1, 1}, {0, 0}});
  CHECK(basis->dimension() == 3);
  CHECK(basis->sector_count() == 2);
  CHECK(basis->index_of(Ket{1, 0, 0}).has_value());
  CHECK_FALSE(basis->index_of(Ket{0, 1, 0}).has_value());  // sector (1,0) absent

  CHECK_THROWS_AS(SectorBasis::build_sectors(cube(1), {{1, 1}, {1, 1}}),
                  ConfigError);  // duplicate label
  CHECK_THROWS_AS(SectorBasis::build_sectors(cube(1), {{9, 0}}),
                  ConfigError);  // empty under the truncation
}

TEST_CASE("fock state") {
  auto basis = SectorBasis::build(cube(3));
  auto psi = fock_state(basis, Ket{2, 1, 3});
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(psi.leaked_weight() == 0.0);
  auto idx = basis->index_of(Ket{2, 1, 3});
  CHECK(std::abs(psi.amplitudes()[*idx] - 1.0) < 1e-15);

  CHECK_THROWS_AS(fock_state(basis, Ket{7, 0, 0}), OutOfTruncation);
  try {
    fock_state(basis, Ket{7, 0, 0});
  } catch (const OutOfTruncation& e) {
    CHECK(std::string(e.what()).find('7') != std::string::npos);
  }
}

TEST_CASE("coherent state populations are Poisson") {
  auto basis = SectorBasis::build([]{
    Truncation t;
    t.n_max_a = 1;
    t.n_max_b = 1;
    t.n_max_c = 25;
    return t;
  }());
  double nbar = 1.8;
  auto psi = coherent_state(basis, Mode::c, std::sqrt(nbar), {0, 0});
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(psi.leaked_weight() >= 0.0);
  CHECK(psi.leaked_weight() < 1e-12);

  auto dist = populations(psi, Mode::c);
  CHECK(dist.p[0] == doctest::Approx(0.16529888822158653).epsilon(1e-13));
  CHECK(dist.mean == doctest::Approx(nbar).epsilon(1e-12));
  double pn = dist.p[0];
  for (int n = 1; n <= 6; ++n) {
    pn *= nbar / n;  // Poisson recursion p_n = p_{n-1} nbar / n
    CHECK(dist.p[n] == doctest::Approx(pn).epsilon(1e-12));
  }
  // the other modes stay in vacuum
  CHECK(populations(psi, Mode::a).p[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(populations(psi, Mode::b).p[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("coherent state truncation guard") {
  // amplitude too large for the cutoff: refused unless leakage is accepted
  auto small = SectorBasis::build(cube(6));
  CHECK_THROWS_AS(coherent_state(small, Mode::c, std::sqrt(1.8), {0, 0}),
                  TruncationLeak);
  auto psi = coherent_state(small, Mode::c, std::sqrt(1.8), {0, 0}, true);
  CHECK(psi.leaked_weight() > 0.0);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-14));  // renormalized

  // a pump of nbar = 3.7 fits comfortably in 25 levels
  auto big = SectorBasis::build([]{
    Truncation t;
    t.n_max_a = 25;
    t.n_max_b = 1;
    t.n_max_c = 1;
    return t;
  }());
  auto pump = coherent_state(big, Mode::a, std::sqrt(3.7), {0, 0});
  CHECK(pump.leaked_weight() < 1e-9);
}

TEST_CASE("coherent state respects the spectator occupations") {
  auto basis = SectorBasis::build([]{
    Truncation t;
    t.n_max_a = 2;
    t.n_max_b = 2;
    t.n_max_c = 12;
    return t;
  }());
  auto psi = coherent_state(basis, Mode::c, 1.0, {1, 0});
  CHECK(populations(psi, Mode::a).mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(populations(psi, Mode::b).mean == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(populations(psi, Mode::c).mean == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ladder operators carry the usual matrix elements") {
  auto basis = SectorBasis::build(cube(3));
  auto psi = fock_state(basis, Ket{0, 1, 1});

  // a' b c |011> = |100>
  auto out = apply_ladder(psi, Mode::c, Ladder::lower);
  out = apply_ladder(out, Mode::b, Ladder::lower);
  out = apply_ladder(out, Mode::a, Ladder::raise);
  auto idx = basis->index_of(Ket{1, 0, 0});
  CHECK(std::abs(out.amplitudes()[*idx] - 1.0) < 1e-15);
  CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out.leaked_weight() == 0.0);

  // a a' |n> = (n+1) |n> below the cutoff
  auto two = fock_state(basis, Ket{2, 0, 0});
  auto back = apply_ladder(apply_ladder(two, Mode::a, Ladder::raise), Mode::a,
                           Ladder::lower);
  idx = basis->index_of(Ket{2, 0, 0});
  CHECK(std::abs(back.amplitudes()[*idx] - 3.0) < 1e-14);

  // lowering the vacuum annihilates
  auto vac = fock_state(basis, Ket{0, 0, 0});
  CHECK(apply_ladder(vac, Mode::b, Ladder::lower).norm() == 0.0);
}

TEST_CASE("raising at the cutoff records the lost weight") {
  auto basis = SectorBasis::build(cube(3));
  auto top = fock_state(basis, Ket{3, 0, 0});
  auto out = apply_ladder(top, Mode::a, Ladder::raise);
  CHECK(out.norm() == 0.0);
  CHECK(out.leaked_weight() == doctest::Approx(4.0).epsilon(1e-15));  // (n+1)|amp|^2
}

TEST_CASE("ladder weight lost to an absent sector is recorded") {
  auto basis = SectorBasis::build_sectors(cube(1), {{1, 1}});
  auto psi = fock_state(basis, Ket{1, 0, 0});
  auto out = apply_ladder(psi, Mode::a, Ladder::lower);  // |000> not in basis
  CHECK(out.norm() == 0.0);
  CHECK(out.leaked_weight() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("state vector bookkeeping") {
  auto basis = SectorBasis::build(cube(1));
  std::vector<std::complex<double>> amps(basis->dimension(), 0.0);
  auto i100 = *basis->index_of(Ket{1, 0, 0});
  auto i011 = *basis->index_of(Ket{0, 1, 1});
  auto i000 = *basis->index_of(Ket{0, 0, 0});
  amps[i100] = {0.6, 0.0};
  amps[i011] = {0.0, 0.6};
  amps[i000] = {0.52915026221291817, 0.0};  // completes a unit norm
  StateVector psi(basis, amps);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-15));

  auto w = psi.sector_weights();
  REQUIRE(w.size() == basis->sector_count());
  double total = 0.0;
  for (double x : w) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  auto s11 = *basis->find_sector({1, 1});
  CHECK(w[s11] == doctest::Approx(0.72).epsilon(1e-14));

  StateVector half(basis, {amps.begin(), amps.end()});
  half.amplitudes()[i100] *= 0.5;
  half.recompute_norm();
  auto unit = half.normalized();
  CHECK(unit.norm() == doctest::Approx(1.0).epsilon(1e-14));
}
