#include "trilin/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trilin/errors.hpp"

namespace trilin::hilbert {

namespace {

void validate_truncation(const Truncation& t) {
  if (t.n_max_a < 1 || t.n_max_b < 1 || t.n_max_c < 1)
    throw ConfigError("truncation: every n_max must be at least 1");
  if (t.dimension_cap < 1)
    throw ConfigError("truncation: dimension cap must be positive");
}

// Range of na compatible with sector (n1, n2) under the truncation;
// empty when hi < lo.
std::pair<int, int> na_range(const Truncation& t, SectorLabel s) {
  int hi = std::min({t.n_max_a, s.n1, s.n2});
  int lo = std::max({0, s.n1 - t.n_max_b, s.n2 - t.n_max_c});
  return {lo, hi};
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::a: return "a";
    case Mode::b: return "b";
    default: return "c";
  }
}

std::shared_ptr<const SectorBasis> SectorBasis::build(const Truncation& trunc) {
  validate_truncation(trunc);
  std::int64_t full = std::int64_t(trunc.n_max_a + 1) * (trunc.n_max_b + 1) *
                      (trunc.n_max_c + 1);
  if (full > trunc.dimension_cap) {
    std::ostringstream msg;
    msg << "basis dimension " << full << " exceeds cap " << trunc.dimension_cap;
    throw DimensionCap(msg.str());
  }

  auto basis = std::shared_ptr<SectorBasis>(new SectorBasis);
  basis->trunc_ = trunc;
  std::int64_t next = 0;
  for (int n1 = 0; n1 <= trunc.n_max_a + trunc.n_max_b; ++n1) {
    for (int n2 = 0; n2 <= trunc.n_max_a + trunc.n_max_c; ++n2) {
      auto [lo, hi] = na_range(trunc, {n1, n2});
      if (hi < lo) continue;
      basis->sectors_.push_back({{n1, n2}, next, hi - lo + 1, hi});
      next += hi - lo + 1;
    }
  }
  basis->dim_ = next;
  return basis;
}

std::shared_ptr<const SectorBasis> SectorBasis::build_sectors(
    const Truncation& trunc, std::vector<SectorLabel> labels) {
  validate_truncation(trunc);
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    throw ConfigError("build_sectors: duplicate sector label");

  auto basis = std::shared_ptr<SectorBasis>(new SectorBasis);
  basis->trunc_ = trunc;
  std::int64_t next = 0;
  for (const SectorLabel& label : labels) {
    auto [lo, hi] = na_range(trunc, label);
    if (hi < lo) {
      std::ostringstream msg;
      msg << "build_sectors: sector (" << label.n1 << ", " << label.n2
          << ") is empty under the truncation";
      throw ConfigError(msg.str());
    }
    basis->sectors_.push_back({label, next, hi - lo + 1, hi});
    next += hi - lo + 1;
    if (next > trunc.dimension_cap) {
      std::ostringstream msg;
      msg << "requested sectors hold " << next << " or more kets, over cap "
          << trunc.dimension_cap;
      throw DimensionCap(msg.str());
    }
  }
  basis->dim_ = next;
  return basis;
}

std::optional<std::size_t> SectorBasis::find_sector(SectorLabel label) const {
  auto it = std::lower_bound(
      sectors_.begin(), sectors_.end(), label,
      [](const Sector& s, SectorLabel l) { return s.label < l; });
  if (it == sectors_.end() || !(it->label == label)) return std::nullopt;
  return std::size_t(it - sectors_.begin());
}

std::size_t SectorBasis::sector_of_index(std::int64_t index) const {
  auto it = std::upper_bound(
      sectors_.begin(), sectors_.end(), index,
      [](std::int64_t i, const Sector& s) { return i < s.first; });
  return std::size_t(it - sectors_.begin()) - 1;
}

Ket SectorBasis::ket_at(std::int64_t index) const {
  const Sector& s = sectors_[sector_of_index(index)];
  int na = s.na_hi - int(index - s.first);
  return {na, s.label.n1 - na, s.label.n2 - na};
}

std::optional<std::int64_t> SectorBasis::index_of(const Ket& ket) const {
  if (ket.na < 0 || ket.nb < 0 || ket.nc < 0) return std::nullopt;
  if (ket.na > trunc_.n_max_a || ket.nb > trunc_.n_max_b || ket.nc > trunc_.n_max_c)
    return std::nullopt;
  auto si = find_sector(label_of(ket));
  if (!si) return std::nullopt;
  const Sector& s = sectors_[*si];
  return s.first + (s.na_hi - ket.na);
}

StateVector::StateVector(std::shared_ptr<const SectorBasis> basis,
                         std::vector<std::complex<double>> amplitudes,
                         double leaked_weight)
    : basis_(std::move(basis)), amps_(std::move(amplitudes)), leaked_(leaked_weight) {
  if (!basis_) throw ConfigError("state: null basis");
  if (std::int64_t(amps_.size()) != basis_->dimension())
    throw ConfigError("state: amplitude count does not match basis dimension");
  recompute_norm();
}

void StateVector::recompute_norm() {
  double s = 0.0;
  for (const auto& z : amps_) s += std::norm(z);
  norm_ = std::sqrt(s);
}

StateVector StateVector::normalized() const {
  if (norm_ == 0.0) throw ConfigError("cannot normalize the zero vector");
  std::vector<std::complex<double>> scaled(amps_);
  for (auto& z : scaled) z /= norm_;
  return StateVector(basis_, std::move(scaled), leaked_);
}

std::vector<double> StateVector::sector_weights() const {
  std::vector<double> w(basis_->sector_count(), 0.0);
  for (std::size_t s = 0; s < basis_->sector_count(); ++s) {
    const Sector& sec = basis_->sector(s);
    double acc = 0.0;
    for (int k = 0; k < sec.size; ++k) acc += std::norm(amps_[sec.first + k]);
    w[s] = acc;
  }
  return w;
}

StateVector fock_state(std::shared_ptr<const SectorBasis> basis, const Ket& ket) {
  auto idx = basis->index_of(ket);
  if (!idx) {
    std::ostringstream msg;
    msg << "|" << ket.na << ", " << ket.nb << ", " << ket.nc
        << "> is outside the basis";
    throw OutOfTruncation(msg.str());
  }
  std::vector<std::complex<double>> amps(basis->dimension(), 0.0);
  amps[*idx] = 1.0;
  return StateVector(std::move(basis), std::move(amps));
}

StateVector coherent_state(std::shared_ptr<const SectorBasis> basis, Mode mode,
                           std::complex<double> alpha,
                           std::array<int, 2> other_occupations,
                           bool allow_leak) {
  int n_max = basis->truncation().n_max(mode);
  double a2 = std::norm(alpha);

  // Poisson weights over the kept levels, by upward recursion.
  std::vector<double> w(n_max + 1);
  w[0] = std::exp(-a2);
  for (int n = 1; n <= n_max; ++n) w[n] = w[n - 1] * a2 / n;
  double kept = 0.0;
  for (double x : w) kept += x;
  double leak = std::max(0.0, 1.0 - kept);

  if (!allow_leak) {
    if (a2 > 0.25 * n_max) {
      std::ostringstream msg;
      msg << "coherent state |alpha|^2 = " << a2 << " needs n_max >= "
          << 4.0 * a2 << " on mode " << mode_name(mode)
          << " (got " << n_max << ")";
      throw TruncationLeak(msg.str());
    }
    if (leak > 1.0e-6) {
      std::ostringstream msg;
      msg << "coherent state would leak " << leak
          << " probability past the cutoff (limit 1e-6)";
      throw TruncationLeak(msg.str());
    }
  }

  Ket base;
  int slot = 0;
  for (Mode m : {Mode::a, Mode::b, Mode::c}) {
    int occ = (m == mode) ? 0 : other_occupations[slot++];
    if (m == Mode::a) base.na = occ;
    if (m == Mode::b) base.nb = occ;
    if (m == Mode::c) base.nc = occ;
  }

  std::vector<std::complex<double>> amps(basis->dimension(), 0.0);
  std::complex<double> c = std::exp(-0.5 * a2) / std::sqrt(kept);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) c *= alpha / std::sqrt(double(n));
    Ket k = base;
    if (mode == Mode::a) k.na = n;
    if (mode == Mode::b) k.nb = n;
    if (mode == Mode::c) k.nc = n;
    auto idx = basis->index_of(k);
    if (!idx) {
      std::ostringstream msg;
      msg << "coherent state ket |" << k.na << ", " << k.nb << ", " << k.nc
          << "> is outside the basis";
      throw OutOfTruncation(msg.str());
    }
    amps[*idx] = c;
  }
  return StateVector(std::move(basis), std::move(amps), leak);
}

PhononDistribution populations(const StateVector& state, Mode mode) {
  const SectorBasis& basis = state.basis();
  PhononDistribution dist;
  dist.mode = mode;
  dist.p.assign(basis.truncation().n_max(mode) + 1, 0.0);
  auto amps = state.amplitudes();
  for (std::size_t s = 0; s < basis.sector_count(); ++s) {
    const Sector& sec = basis.sector(s);
    for (int k = 0; k < sec.size; ++k) {
      Ket ket = basis.ket_at(sec.first + k);
      dist.p[ket.occupation(mode)] += std::norm(amps[sec.first + k]);
    }
  }
  for (std::size_t n = 0; n < dist.p.size(); ++n) dist.mean += double(n) * dist.p[n];
  return dist;
}

StateVector apply_ladder(const StateVector& state, Mode mode, Ladder op) {
  const SectorBasis& basis = state.basis();
  int n_max = basis.truncation().n_max(mode);
  auto amps = state.amplitudes();
  std::vector<std::complex<double>> out(basis.dimension(), 0.0);
  double leak = 0.0;

  for (std::size_t s = 0; s < basis.sector_count(); ++s) {
    const Sector& sec = basis.sector(s);
    for (int k = 0; k < sec.size; ++k) {
      std::complex<double> amp = amps[sec.first + k];
      if (amp == 0.0) continue;
      Ket ket = basis.ket_at(sec.first + k);
      int n = ket.occupation(mode);

      Ket target = ket;
      double factor = 0.0;
      if (op == Ladder::lower) {
        if (n == 0) continue;
        factor = std::sqrt(double(n));
        if (mode == Mode::a) --target.na;
        if (mode == Mode::b) --target.nb;
        if (mode == Mode::c) --target.nc;
      } else {
        if (n == n_max) {
          leak += double(n + 1) * std::norm(amp);
          continue;
        }
        factor = std::sqrt(double(n + 1));
        if (mode == Mode::a) ++target.na;
        if (mode == Mode::b) ++target.nb;
        if (mode == Mode::c) ++target.nc;
      }

      auto idx = basis.index_of(target);
      if (!idx) {
        // Restricted-sector basis: the image sector is not allocated.
        leak += factor * factor * std::norm(amp);
        continue;
      }
      out[*idx] += factor * amp;
    }
  }
  return StateVector(state.basis_ptr(), std::move(out),
                     state.leaked_weight() + leak);
}

}  // namespace trilin::hilbert
