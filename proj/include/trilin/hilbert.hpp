#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace trilin::hilbert {

enum class Mode { a = 0, b = 1, c = 2 };

const char* mode_name(Mode m);

struct Ket {
  int na = 0, nb = 0, nc = 0;
  int occupation(Mode m) const {
    return m == Mode::a ? na : (m == Mode::b ? nb : nc);
  }
  friend bool operator==(const Ket&, const Ket&) = default;
};

struct Truncation {
  int n_max_a = 0, n_max_b = 0, n_max_c = 0;
  std::int64_t dimension_cap = 5'000'000;
  int n_max(Mode m) const {
    return m == Mode::a ? n_max_a : (m == Mode::b ? n_max_b : n_max_c);
  }
};

// Conserved pair (N1, N2) = (na + nb, na + nc). The trilinear interaction
// a'bc + ab'c' commutes with both, so the Hamiltonian never connects
// different sectors.
struct SectorLabel {
  int n1 = 0, n2 = 0;
  friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
  friend auto operator<=>(const SectorLabel&, const SectorLabel&) = default;
};

struct Sector {
  SectorLabel label;
  std::int64_t first = 0;  // global index of the sector's first basis ket
  int size = 0;
  int na_hi = 0;  // na of the first ket; kets are ordered by descending na
};

// Product Fock basis grouped into conserved sectors. Within a sector the
// kets are |na, N1 - na, N2 - na> for na descending from na_hi, which makes
// every sector block of the trilinear Hamiltonian real symmetric
// tridiagonal. Kets are recomputed from the layout on demand; nothing is
// stored per basis state.
class SectorBasis {
 public:
  // Full basis over all occupations within the truncation.
  static std::shared_ptr<const SectorBasis> build(const Truncation& trunc);

  // Only the requested sectors, for work in a few large blocks without
  // paying for the full product space. Labels must be distinct and nonempty
  // under the truncation.
  static std::shared_ptr<const SectorBasis> build_sectors(
      const Truncation& trunc, std::vector<SectorLabel> labels);

  std::int64_t dimension() const { return dim_; }
  const Truncation& truncation() const { return trunc_; }

  std::size_t sector_count() const { return sectors_.size(); }
  const Sector& sector(std::size_t i) const { return sectors_[i]; }
  std::optional<std::size_t> find_sector(SectorLabel label) const;

  Ket ket_at(std::int64_t index) const;
  std::optional<std::int64_t> index_of(const Ket& ket) const;
  std::size_t sector_of_index(std::int64_t index) const;

  static SectorLabel label_of(const Ket& k) { return {k.na + k.nb, k.na + k.nc}; }

 private:
  SectorBasis() = default;
  Truncation trunc_;
  std::vector<Sector> sectors_;  // sorted by label
  std::int64_t dim_ = 0;
};

// Amplitudes over a SectorBasis, stored sector-major (each sector's
// amplitudes contiguous, same order as the basis). Tracks the 2-norm at
// construction and the probability lost to truncation by whatever produced
// the state.
class StateVector {
 public:
  StateVector(std::shared_ptr<const SectorBasis> basis,
              std::vector<std::complex<double>> amplitudes,
              double leaked_weight = 0.0);

  const SectorBasis& basis() const { return *basis_; }
  const std::shared_ptr<const SectorBasis>& basis_ptr() const { return basis_; }
  std::span<const std::complex<double>> amplitudes() const { return amps_; }
  std::span<std::complex<double>> amplitudes() { return amps_; }
  double norm() const { return norm_; }
  double leaked_weight() const { return leaked_; }
  void recompute_norm();

  StateVector normalized() const;

  // Probability weight per sector, |amplitudes|^2 summed within each block.
  std::vector<double> sector_weights() const;

 private:
  std::shared_ptr<const SectorBasis> basis_;
  std::vector<std::complex<double>> amps_;
  double norm_ = 0.0;
  double leaked_ = 0.0;
};

// |na, nb, nc>. Throws OutOfTruncation if the ket is not in the basis.
StateVector fock_state(std::shared_ptr<const SectorBasis> basis, const Ket& ket);

// Coherent state of amplitude alpha in one mode, Fock occupations in the two
// others (given in (a, b, c) order with `mode` skipped). The truncated tail
// weight 1 - exp(-|alpha|^2) sum |alpha|^(2n) / n!  is recorded as leaked
// weight and the kept amplitudes are renormalized. Unless allow_leak is set,
// requires |alpha|^2 <= n_max / 4 and leak <= 1e-6; otherwise throws
// TruncationLeak.
StateVector coherent_state(std::shared_ptr<const SectorBasis> basis, Mode mode,
                           std::complex<double> alpha,
                           std::array<int, 2> other_occupations,
                           bool allow_leak = false);

struct PhononDistribution {
  Mode mode = Mode::a;
  std::vector<double> p;  // index = occupation number
  double mean = 0.0;
};

// Marginal occupation distribution of one mode. The state is used as given;
// amplitudes are not renormalized here.
PhononDistribution populations(const StateVector& state, Mode mode);

enum class Ladder { lower, raise };

// Applies a or a' (b, c likewise) without renormalizing. Raising a ket at
// the cutoff drops weight (n+1)|amp|^2, which is added to the result's
// leaked weight; on a restricted-sector basis, weight moved into an absent
// sector is dropped and counted the same way.
StateVector apply_ladder(const StateVector& state, Mode mode, Ladder op);

}  // namespace trilin::hilbert
