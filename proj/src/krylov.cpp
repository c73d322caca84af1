#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <span>
#include <sstream>
#include <vector>

#include "trilin/dynamics.hpp"
#include "trilin/errors.hpp"

namespace trilin::dynamics::detail {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

void apply_tridiag(std::span<const double> d, std::span<const double> e,
                   const VectorXcd& x, VectorXcd& y) {
  Eigen::Index n = x.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex acc = d[i] * x[i];
    if (i > 0) acc += e[i - 1] * x[i - 1];
    if (i + 1 < n) acc += e[i] * x[i + 1];
    y[i] = acc;
  }
}

double gershgorin(std::span<const double> d, std::span<const double> e) {
  double bound = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double row = std::abs(d[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    if (i + 1 < d.size()) row += std::abs(e[i]);
    bound = std::max(bound, row);
  }
  return bound;
}

// u(s) = exp(-i T s) e1 for the m x m Lanczos tridiagonal T, via its
// eigendecomposition (m <= max_dim, so this is cheap).
struct SmallExp {
  VectorXd lambda;
  MatrixXd q;
  VectorXd q_row0;

  void factor(const VectorXd& alpha, const VectorXd& beta) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver;
    if (alpha.size() == 1) {
      lambda = alpha;
      q = MatrixXd::Ones(1, 1);
    } else {
      solver.computeFromTridiagonal(alpha, beta, Eigen::ComputeEigenvectors);
      if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("krylov: small eigenproblem failed");
      lambda = solver.eigenvalues();
      q = solver.eigenvectors();
    }
    q_row0 = q.row(0);
  }

  VectorXcd at(double s) const {
    VectorXcd w(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
      w[i] = q_row0[i] * std::polar(1.0, -lambda[i] * s);
    VectorXcd out(lambda.size());
    out.real() = q * w.real();
    out.imag() = q * w.imag();
    return out;
  }
};

}  // namespace

void krylov_evolve_block(std::span<const double> diag, std::span<const double> sub,
                         std::span<Complex> psi, double t, double tol, int max_dim) {
  const Eigen::Index n = Eigen::Index(psi.size());
  if (n == 0 || t == 0.0) return;
  Eigen::Map<VectorXcd> state(psi.data(), n);
  double norm0 = state.norm();
  if (norm0 == 0.0) return;

  if (n == 1) {
    state[0] *= std::polar(1.0, -diag[0] * t);
    return;
  }

  const double hbound = gershgorin(diag, sub);
  const double t_total = std::abs(t);
  const double sign = t < 0.0 ? -1.0 : 1.0;
  const int m_cap = int(std::min<Eigen::Index>(max_dim, n));
  const double breakdown_tol = 1.0e-13 * std::max(hbound, 1.0);

  // Initial substep: aim for ||H|| tau of order the subspace size.
  double tau = std::min(t_total, m_cap / std::max(hbound, 1.0e-300));

  MatrixXcd v(n, m_cap + 1);
  VectorXd alpha(m_cap), beta(m_cap);
  VectorXcd w(n);
  SmallExp small;

  double remaining = t_total;
  long iterations = 0;
  while (remaining > 0.0) {
    if (++iterations > 200000)
      throw ConvergenceFailure("krylov: substep count exceeded 200000");
    tau = std::min(tau, remaining);

    double step_norm = state.norm();
    if (step_norm == 0.0) return;
    v.col(0) = state / step_norm;

    int m = 0;
    bool breakdown = false;
    double beta_next = 0.0;
    for (int k = 0; k < m_cap; ++k) {
      apply_tridiag(diag, sub, v.col(k), w);
      if (k > 0) w -= beta[k - 1] * v.col(k - 1);
      alpha[k] = std::real(v.col(k).dot(w));
      w -= alpha[k] * v.col(k);
      // Full reorthogonalization against every Lanczos vector so far.
      for (int j = 0; j <= k; ++j) w -= v.col(j).dot(w) * v.col(j);
      m = k + 1;
      double b = w.norm();
      if (b <= breakdown_tol) {
        breakdown = true;
        beta_next = 0.0;
        break;
      }
      beta[k] = b;
      beta_next = b;
      if (k + 1 < m_cap + 1) v.col(k + 1) = w / b;
    }

    small.factor(alpha.head(m), beta.head(std::max(0, m - 1)));

    double err = 0.0;
    if (!breakdown && m == m_cap && m < n) {
      // Residual-based local error: |last component of u(s)| integrated
      // over the substep, sampled at a few points.
      double emax = 0.0;
      for (double frac : {1.0 / 3.0, 2.0 / 3.0, 1.0}) {
        VectorXcd u = small.at(sign * tau * frac);
        emax = std::max(emax, std::abs(u[m - 1]));
      }
      err = beta_next * tau * emax;
    }

    double budget = tol * (tau / t_total);
    if (err <= budget || breakdown || m == n) {
      VectorXcd u = small.at(sign * tau);
      state = v.leftCols(m) * (step_norm * u.head(m));
      remaining -= tau;
      if (err < 0.1 * budget && tau < remaining) tau *= 1.5;
    } else {
      tau *= 0.5;
      if (tau < t_total * 1.0e-13) {
        std::ostringstream msg;
        msg << "krylov: substep collapsed below " << t_total * 1.0e-13
            << " s without meeting tol " << tol << "; raise the subspace size";
        throw ConvergenceFailure(msg.str());
      }
    }
  }
}

}  // namespace trilin::dynamics::detail
