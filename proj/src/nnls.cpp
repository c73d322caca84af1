#include "trilin/nnls.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <vector>

#include "trilin/errors.hpp"

namespace trilin::nnls {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Lawson-Hanson on precomputed normal equations G = A'A, h = A'y - mu.
VectorXd lawson_hanson(const MatrixXd& g, const VectorXd& h) {
  const Eigen::Index n = g.cols();
  VectorXd x = VectorXd::Zero(n);
  std::vector<bool> passive(n, false);

  double scale = h.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, g(i, i));
  const double w_tol = 1.0e-12 * std::max(scale, 1.0e-300);

  auto solve_passive = [&](VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (passive[i]) idx.push_back(i);
    MatrixXd gp(idx.size(), idx.size());
    VectorXd hp(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      hp[r] = h[idx[r]];
      for (std::size_t c = 0; c < idx.size(); ++c) gp(r, c) = g(idx[r], idx[c]);
    }
    VectorXd zp = gp.ldlt().solve(hp);
    z = VectorXd::Zero(n);
    for (std::size_t r = 0; r < idx.size(); ++r) z[idx[r]] = zp[r];
  };

  long outer = 0;
  const long cap = 40 * std::max<long>(n, 1);
  while (true) {
    if (++outer > cap) throw ConvergenceFailure("nnls: active-set cap exceeded");

    VectorXd w = h - g * x;
    Eigen::Index best = -1;
    double best_w = w_tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!passive[i] && w[i] > best_w) {
        best_w = w[i];
        best = i;
      }
    }
    if (best < 0) return x;
    passive[best] = true;

    VectorXd z;
    solve_passive(z);
    long inner = 0;
    while (true) {
      if (++inner > cap) throw ConvergenceFailure("nnls: inner loop cap exceeded");
      bool feasible = true;
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[i] && z[i] <= 0.0) { feasible = false; break; }
      if (feasible) break;

      double step = 1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[i] && z[i] <= 0.0) {
          double s = x[i] / (x[i] - z[i]);
          step = std::min(step, s);
        }
      }
      x += step * (z - x);
      // The blocking variable lands on zero up to roundoff; drop it (and any
      // other pinned variable) from the passive set so the loop progresses.
      double drop_tol = 1.0e-12 * std::max(x.maxCoeff(), 1.0e-300);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[i] && z[i] <= 0.0 && x[i] <= drop_tol) {
          x[i] = 0.0;
          passive[i] = false;
        }
      }
      solve_passive(z);
    }
    x = z;
  }
}

}  // namespace

VectorXd solve(const MatrixXd& a, const VectorXd& y, double mu) {
  if (a.rows() != y.size()) throw ConfigError("nnls: row count mismatch");
  MatrixXd g = a.transpose() * a;
  VectorXd h = a.transpose() * y;
  return lawson_hanson(g, h.array() - mu);
}

VectorXd solve_sum_bounded(const MatrixXd& a, const VectorXd& y, double bound) {
  if (bound < 0.0) throw ConfigError("nnls: sum bound must be nonnegative");
  MatrixXd g = a.transpose() * a;
  VectorXd h = a.transpose() * y;

  VectorXd x = lawson_hanson(g, h);
  if (x.sum() <= bound * (1.0 + 1.0e-12)) return x;

  // sum(x(mu)) decreases piecewise linearly in mu; at mu = max h it is 0.
  double lo = 0.0, hi = h.maxCoeff();
  VectorXd best = lawson_hanson(g, h.array() - hi);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    x = lawson_hanson(g, h.array() - mid);
    if (x.sum() > bound) {
      lo = mid;
    } else {
      hi = mid;
      best = x;
      if (bound - x.sum() <= 1.0e-12 * std::max(1.0, bound)) break;
    }
  }
  return best;
}

}  // namespace trilin::nnls
