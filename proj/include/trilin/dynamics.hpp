#pragma once

#include <Eigen/Core>

#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "trilin/hilbert.hpp"

namespace trilin::dynamics {

using Complex = std::complex<double>;

struct SectorEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns; first component above 1e-12 made positive
};

// Sector-blocked Hamiltonian. Every block is real symmetric tridiagonal in
// the basis ordering (descending na), so only the diagonal and subdiagonal
// are stored. Two forms share the storage:
//   trilinear:       H = delta * na + xi (a'bc + a b'c')
//   beam-splitter:   H = omega_c (nc + (na - nb - 1)/2) + xi (c' a b' + c a' b)
// The off-diagonals coincide; the forms differ by a diagonal that is constant
// within each sector, so sector spectra agree up to per-sector offsets.
class HamiltonianOp {
 public:
  enum class Form { trilinear, tavis_cummings };

  static HamiltonianOp trilinear(std::shared_ptr<const hilbert::SectorBasis> basis,
                                 double xi, double delta);
  static HamiltonianOp tavis_cummings(std::shared_ptr<const hilbert::SectorBasis> basis,
                                      double xi, double omega_c);

  Form form() const { return form_; }
  double xi() const { return xi_; }
  double delta() const { return delta_; }
  double omega_c() const { return omega_c_; }
  const hilbert::SectorBasis& basis() const { return *basis_; }
  const std::shared_ptr<const hilbert::SectorBasis>& basis_ptr() const { return basis_; }

  std::span<const double> diagonal(std::size_t s) const;
  std::span<const double> subdiagonal(std::size_t s) const;  // size - 1 entries
  Eigen::MatrixXd dense_block(std::size_t s) const;

  // y = H x restricted to sector s (x, y are the sector slices).
  void apply_sector(std::size_t s, std::span<const Complex> x,
                    std::span<Complex> y) const;
  std::vector<Complex> apply(std::span<const Complex> x) const;
  double expectation(const hilbert::StateVector& state) const;

  // Gershgorin bound on the sector's spectral radius.
  double sector_norm_bound(std::size_t s) const;

  // Eigendecomposition of one sector block, computed on first use and
  // cached. Thread-safe; deterministic for a fixed build.
  const SectorEigen& eigensystem(std::size_t s) const;
  void precompute_eigensystems() const;

 private:
  HamiltonianOp(std::shared_ptr<const hilbert::SectorBasis> basis, Form form,
                double xi, double delta, double omega_c);

  std::shared_ptr<const hilbert::SectorBasis> basis_;
  Form form_;
  double xi_, delta_, omega_c_;
  std::vector<double> diag_;  // concatenated per sector (offsets = sector.first)
  std::vector<double> sub_;   // concatenated, sector.first - sector_index each

  struct Cache {
    std::mutex mutex;
    std::vector<std::unique_ptr<SectorEigen>> slots;
  };
  std::unique_ptr<Cache> cache_;
};

struct SpectrumSlice {
  hilbert::SectorLabel label;
  std::vector<double> eigenvalues;          // ascending
  std::vector<std::vector<double>> vectors; // empty unless requested
};

// Eigenvalues (optionally vectors) of one sector. Throws ConfigError if the
// sector is absent from the basis.
SpectrumSlice sector_spectrum(const HamiltonianOp& h, hilbert::SectorLabel label,
                              bool want_vectors = false);

// Spectrum of the one-excitation sector (1, 1) for each detuning in
// `deltas`, at fixed xi: the two-level avoided crossing with minimum gap
// 2 xi at delta = 0.
std::vector<SpectrumSlice> avoided_crossing_scan(
    std::shared_ptr<const hilbert::SectorBasis> basis, double xi,
    std::span<const double> deltas);

struct Propagator {
  enum class Method { dense, krylov };
  Method method = Method::dense;
  double tol = 1.0e-10;     // krylov: bound on accumulated local error
  int max_krylov_dim = 30;  // krylov subspace size per substep
};

// exp(-i H t) applied sector by sector. The dense path diagonalizes each
// block once (cached on the operator); the Krylov path runs Lanczos with
// full reorthogonalization and adaptive substeps, and throws
// ConvergenceFailure if the step control stalls.
hilbert::StateVector evolve(const HamiltonianOp& h, const hilbert::StateVector& state,
                            double t, const Propagator& prop = {});

// Instantaneous-quench schedule: park far off resonance, jump to resonance,
// hold, jump back. Far-detuned segments only imprint number-dependent phases
// that no population observable sees, so the model is a single resonant
// evolution for `hold`. Both operators must live on the state's basis.
hilbert::StateVector quench_schedule(const HamiltonianOp& h_far,
                                     const HamiltonianOp& h_resonant,
                                     const hilbert::StateVector& state, double hold,
                                     const Propagator& prop = {});

namespace detail {
// exp(-i H t) on one tridiagonal block, in place. Lanczos with full
// reorthogonalization; substep size adapts to an a-posteriori residual
// estimate until the accumulated-error budget tol * ||psi|| is met.
void krylov_evolve_block(std::span<const double> diag, std::span<const double> sub,
                         std::span<Complex> psi, double t, double tol, int max_dim);
}  // namespace detail

}  // namespace trilin::dynamics
