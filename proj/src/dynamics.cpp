#include "trilin/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "trilin/errors.hpp"
#include "trilin/parallel.hpp"

namespace trilin::dynamics {

using hilbert::Ket;
using hilbert::Sector;
using hilbert::SectorBasis;
using hilbert::SectorLabel;
using hilbert::StateVector;

HamiltonianOp::HamiltonianOp(std::shared_ptr<const SectorBasis> basis, Form form,
                             double xi, double delta, double omega_c)
    : basis_(std::move(basis)), form_(form), xi_(xi), delta_(delta),
      omega_c_(omega_c), cache_(std::make_unique<Cache>()) {
  if (!basis_) throw ConfigError("hamiltonian: null basis");
  diag_.assign(basis_->dimension(), 0.0);
  sub_.assign(basis_->dimension() - std::int64_t(basis_->sector_count()), 0.0);
  cache_->slots.resize(basis_->sector_count());

  for (std::size_t s = 0; s < basis_->sector_count(); ++s) {
    const Sector& sec = basis_->sector(s);
    std::int64_t dpos = sec.first;
    std::int64_t spos = sec.first - std::int64_t(s);
    for (int k = 0; k < sec.size; ++k) {
      int na = sec.na_hi - k;
      int nb = sec.label.n1 - na;
      int nc = sec.label.n2 - na;
      diag_[dpos + k] = (form_ == Form::trilinear)
                            ? delta_ * na
                            : omega_c_ * (nc + 0.5 * (na - nb - 1));
      if (k + 1 < sec.size) {
        // coupling <na, nb, nc | H | na - 1, nb + 1, nc + 1>
        sub_[spos + k] = xi_ * std::sqrt(double(na) * (nb + 1) * (nc + 1));
      }
    }
  }
}

HamiltonianOp HamiltonianOp::trilinear(std::shared_ptr<const SectorBasis> basis,
                                       double xi, double delta) {
  return HamiltonianOp(std::move(basis), Form::trilinear, xi, delta, 0.0);
}

HamiltonianOp HamiltonianOp::tavis_cummings(std::shared_ptr<const SectorBasis> basis,
                                            double xi, double omega_c) {
  return HamiltonianOp(std::move(basis), Form::tavis_cummings, xi, 0.0, omega_c);
}

std::span<const double> HamiltonianOp::diagonal(std::size_t s) const {
  const Sector& sec = basis_->sector(s);
  return {diag_.data() + sec.first, std::size_t(sec.size)};
}

std::span<const double> HamiltonianOp::subdiagonal(std::size_t s) const {
  const Sector& sec = basis_->sector(s);
  return {sub_.data() + sec.first - std::int64_t(s), std::size_t(sec.size - 1)};
}

Eigen::MatrixXd HamiltonianOp::dense_block(std::size_t s) const {
  auto d = diagonal(s);
  auto e = subdiagonal(s);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    m(i, i) = d[i];
    if (i + 1 < d.size()) m(i, i + 1) = m(i + 1, i) = e[i];
  }
  return m;
}

void HamiltonianOp::apply_sector(std::size_t s, std::span<const Complex> x,
                                 std::span<Complex> y) const {
  auto d = diagonal(s);
  auto e = subdiagonal(s);
  std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc = d[i] * x[i];
    if (i > 0) acc += e[i - 1] * x[i - 1];
    if (i + 1 < n) acc += e[i] * x[i + 1];
    y[i] = acc;
  }
}

std::vector<Complex> HamiltonianOp::apply(std::span<const Complex> x) const {
  if (std::int64_t(x.size()) != basis_->dimension())
    throw ConfigError("apply: vector length does not match basis");
  std::vector<Complex> y(x.size());
  for (std::size_t s = 0; s < basis_->sector_count(); ++s) {
    const Sector& sec = basis_->sector(s);
    apply_sector(s, x.subspan(sec.first, sec.size),
                 std::span<Complex>(y).subspan(sec.first, sec.size));
  }
  return y;
}

double HamiltonianOp::expectation(const StateVector& state) const {
  if (state.basis_ptr() != basis_)
    throw ConfigError("expectation: state lives on a different basis");
  auto x = state.amplitudes();
  std::vector<Complex> y = apply(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    acc += std::real(std::conj(x[i]) * y[i]);
  return acc;
}

double HamiltonianOp::sector_norm_bound(std::size_t s) const {
  auto d = diagonal(s);
  auto e = subdiagonal(s);
  double bound = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double row = std::abs(d[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    if (i + 1 < d.size()) row += std::abs(e[i]);
    bound = std::max(bound, row);
  }
  return bound;
}

const SectorEigen& HamiltonianOp::eigensystem(std::size_t s) const {
  std::lock_guard lock(cache_->mutex);
  auto& slot = cache_->slots[s];
  if (!slot) {
    auto d = diagonal(s);
    auto e = subdiagonal(s);
    Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(d.data(), d.size());
    auto eig = std::make_unique<SectorEigen>();
    if (d.size() == 1) {
      eig->values = dv;
      eig->vectors = Eigen::MatrixXd::Ones(1, 1);
    } else {
      Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(e.data(), e.size());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
      solver.computeFromTridiagonal(dv, ev, Eigen::ComputeEigenvectors);
      if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("tridiagonal eigensolver failed");
      eig->values = solver.eigenvalues();
      eig->vectors = solver.eigenvectors();
      // Fix each column's sign: first component of magnitude > 1e-12 positive.
      for (Eigen::Index c = 0; c < eig->vectors.cols(); ++c) {
        for (Eigen::Index r = 0; r < eig->vectors.rows(); ++r) {
          double v = eig->vectors(r, c);
          if (std::abs(v) > 1.0e-12) {
            if (v < 0.0) eig->vectors.col(c) *= -1.0;
            break;
          }
        }
      }
    }
    slot = std::move(eig);
  }
  return *slot;
}

void HamiltonianOp::precompute_eigensystems() const {
  for (std::size_t s = 0; s < basis_->sector_count(); ++s) eigensystem(s);
}

SpectrumSlice sector_spectrum(const HamiltonianOp& h, SectorLabel label,
                              bool want_vectors) {
  auto si = h.basis().find_sector(label);
  if (!si) {
    std::ostringstream msg;
    msg << "sector (" << label.n1 << ", " << label.n2 << ") is not in the basis";
    throw ConfigError(msg.str());
  }
  const SectorEigen& eig = h.eigensystem(*si);
  SpectrumSlice slice;
  slice.label = label;
  slice.eigenvalues.assign(eig.values.data(), eig.values.data() + eig.values.size());
  if (want_vectors) {
    slice.vectors.resize(eig.vectors.cols());
    for (Eigen::Index c = 0; c < eig.vectors.cols(); ++c)
      slice.vectors[c].assign(eig.vectors.col(c).data(),
                              eig.vectors.col(c).data() + eig.vectors.rows());
  }
  return slice;
}

std::vector<SpectrumSlice> avoided_crossing_scan(
    std::shared_ptr<const SectorBasis> basis, double xi,
    std::span<const double> deltas) {
  if (!basis->find_sector({1, 1}))
    throw ConfigError("avoided crossing scan needs the (1, 1) sector");
  std::vector<SpectrumSlice> out(deltas.size());
  parallel::parallel_for(std::int64_t(deltas.size()), [&](std::int64_t i) {
    HamiltonianOp h = HamiltonianOp::trilinear(basis, xi, deltas[i]);
    out[i] = sector_spectrum(h, {1, 1});
  });
  return out;
}

hilbert::StateVector evolve(const HamiltonianOp& h, const StateVector& state,
                            double t, const Propagator& prop) {
  if (state.basis_ptr() != h.basis_ptr())
    throw ConfigError("evolve: state lives on a different basis than H");
  const SectorBasis& basis = h.basis();
  auto in = state.amplitudes();
  std::vector<Complex> out(in.begin(), in.end());

  if (t != 0.0) {
    if (prop.method == Propagator::Method::dense) {
      // Make sure all decompositions exist before fanning out, so worker
      // threads never contend on the cache mutex mid-flight.
      h.precompute_eigensystems();
      parallel::parallel_for(
          std::int64_t(basis.sector_count()), [&](std::int64_t s) {
            const Sector& sec = basis.sector(std::size_t(s));
            auto slice = std::span<Complex>(out).subspan(sec.first, sec.size);
            bool empty = true;
            for (const Complex& z : slice)
              if (z != 0.0) { empty = false; break; }
            if (empty) return;
            const SectorEigen& eig = h.eigensystem(std::size_t(s));
            Eigen::Map<Eigen::VectorXcd> v(slice.data(), slice.size());
            Eigen::VectorXcd coeff(v.size());
            coeff.real() = eig.vectors.transpose() * v.real();
            coeff.imag() = eig.vectors.transpose() * v.imag();
            for (Eigen::Index i = 0; i < coeff.size(); ++i)
              coeff[i] *= std::polar(1.0, -eig.values[i] * t);
            v.real() = eig.vectors * coeff.real();
            v.imag() = eig.vectors * coeff.imag();
          });
    } else {
      if (prop.max_krylov_dim < 2)
        throw ConfigError("krylov subspace must allow at least 2 vectors");
      parallel::parallel_for(
          std::int64_t(basis.sector_count()), [&](std::int64_t s) {
            const Sector& sec = basis.sector(std::size_t(s));
            auto slice = std::span<Complex>(out).subspan(sec.first, sec.size);
            detail::krylov_evolve_block(h.diagonal(std::size_t(s)),
                                        h.subdiagonal(std::size_t(s)), slice, t,
                                        prop.tol, prop.max_krylov_dim);
          });
    }
  }

  return StateVector(state.basis_ptr(), std::move(out), state.leaked_weight());
}

hilbert::StateVector quench_schedule(const HamiltonianOp& h_far,
                                     const HamiltonianOp& h_resonant,
                                     const StateVector& state, double hold,
                                     const Propagator& prop) {
  if (h_far.basis_ptr() != state.basis_ptr() ||
      h_resonant.basis_ptr() != state.basis_ptr())
    throw ConfigError("quench: operators and state must share one basis");
  // The parked Hamiltonian is diagonal in occupation up to corrections of
  // order xi / delta_park; in the instantaneous-quench model its segments
  // only add phases per ket, so populations depend on the resonant hold
  // alone. Evolving under h_resonant for `hold` is the whole schedule.
  return evolve(h_resonant, state, hold, prop);
}

}  // namespace trilin::dynamics
