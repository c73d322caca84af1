#include "trilin/observe.hpp"

#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "trilin/constants.hpp"
#include "trilin/errors.hpp"
#include "trilin/nnls.hpp"

namespace trilin::observe {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double sideband_rabi(SidebandKind kind, int n, double omega0) {
  return kind == SidebandKind::blue ? omega0 * std::sqrt(double(n + 1))
                                    : omega0 * std::sqrt(double(n));
}

// Probability of finding the probe excited after driving level n for time t:
// sin^2(Omega_n t / 2), optionally with decaying contrast.
double flop(SidebandKind kind, int n, double omega0, double t,
            const EnvelopeParams& env) {
  double omega_n = sideband_rabi(kind, n, omega0);
  if (env.gamma0 == 0.0)
    return std::pow(std::sin(0.5 * omega_n * t), 2);
  double decay = std::exp(-env.gamma0 * std::pow(double(n + 1), env.power) * t);
  return 0.5 * (1.0 - decay * std::cos(omega_n * t));
}

void validate_signal(const SidebandSignal& s) {
  if (!(s.omega0 > 0.0)) throw ConfigError("sideband: omega0 must be positive");
  if (s.times.size() != s.excited.size())
    throw ConfigError("sideband: times and excited have different lengths");
  for (std::size_t i = 1; i < s.times.size(); ++i)
    if (!(s.times[i] > s.times[i - 1]))
      throw ConfigError("sideband: times must be strictly increasing");
}

}  // namespace

SidebandSignal synthesize_sideband(const hilbert::PhononDistribution& dist,
                                   SidebandKind kind, double omega0,
                                   std::vector<double> times,
                                   const EnvelopeParams& envelope) {
  SidebandSignal out;
  out.kind = kind;
  out.mode = dist.mode;
  out.omega0 = omega0;
  out.times = std::move(times);
  out.excited.assign(out.times.size(), 0.0);
  validate_signal(out);

  std::size_t n_lo = kind == SidebandKind::blue ? 0 : 1;
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    double acc = 0.0;
    for (std::size_t n = n_lo; n < dist.p.size(); ++n)
      acc += dist.p[n] * flop(kind, int(n), omega0, out.times[i], envelope);
    out.excited[i] = acc;
  }
  return out;
}

Reconstruction reconstruct_distribution(const SidebandSignal& signal, int n_cut,
                                        InversionMethod method) {
  validate_signal(signal);
  if (n_cut < 0) throw ConfigError("reconstruction: n_cut must be nonnegative");
  const std::size_t rows = signal.times.size();
  const int n_lo = signal.kind == SidebandKind::blue ? 0 : 1;
  const int cols = n_cut - n_lo + 1;
  if (cols < 1) throw ConfigError("reconstruction: no levels in the model");
  if (rows < std::size_t(cols))
    throw IllConditioned("reconstruction: fewer samples than levels; extend the signal");

  ReconstructionDiagnostics diag;
  double omega_max = sideband_rabi(signal.kind, n_cut, signal.omega0);
  diag.nyquist_dt = constants::pi / omega_max;
  for (std::size_t i = 1; i < rows; ++i)
    diag.max_dt = std::max(diag.max_dt, signal.times[i] - signal.times[i - 1]);
  if (rows >= 2) diag.nyquist_ok = diag.max_dt <= diag.nyquist_dt;

  MatrixXd a(rows, cols);
  VectorXd y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    y[i] = signal.excited[i];
    for (int c = 0; c < cols; ++c)
      a(i, c) = flop(signal.kind, n_lo + c, signal.omega0, signal.times[i], {});
  }

  Eigen::JacobiSVD<MatrixXd> svd(a);
  double smin = svd.singularValues()[svd.singularValues().size() - 1];
  double smax = svd.singularValues()[0];
  diag.condition_number = smin > 0.0 ? smax / smin
                                     : std::numeric_limits<double>::infinity();
  if (!(diag.condition_number < 1.0e8)) {
    std::ostringstream msg;
    msg << "reconstruction: design matrix condition number "
        << diag.condition_number
        << " exceeds 1e8; extend or refine the time window";
    throw IllConditioned(msg.str());
  }

  VectorXd p;
  if (method == InversionMethod::nnls) {
    p = nnls::solve_sum_bounded(a, y, 1.0);
  } else {
    // Projection onto the sideband cosines: with P = (1 - cos(Omega_n t))/2,
    // p_n ~= (2/N) sum_t (1 - 2 P(t)) cos(Omega_n t), clipped at zero.
    p = VectorXd::Zero(cols);
    for (int c = 0; c < cols; ++c) {
      double omega_n = sideband_rabi(signal.kind, n_lo + c, signal.omega0);
      double acc = 0.0;
      for (std::size_t i = 0; i < rows; ++i)
        acc += (1.0 - 2.0 * y[i]) * std::cos(omega_n * signal.times[i]);
      p[c] = std::max(0.0, 2.0 * acc / double(rows));
    }
  }
  diag.residual_l2 = (a * p - y).norm();

  Reconstruction rec;
  rec.diagnostics = diag;
  rec.distribution.mode = signal.mode;
  rec.distribution.p.assign(n_cut + 1, 0.0);
  for (int c = 0; c < cols; ++c) rec.distribution.p[n_lo + c] = p[c];
  if (signal.kind == SidebandKind::red) {
    double tail = 0.0;
    for (int n = 1; n <= n_cut; ++n) tail += rec.distribution.p[n];
    rec.distribution.p[0] = std::max(0.0, 1.0 - tail);
  }
  for (std::size_t n = 0; n < rec.distribution.p.size(); ++n)
    rec.distribution.mean += double(n) * rec.distribution.p[n];
  return rec;
}

namespace {

FitResult fit_against(const hilbert::PhononDistribution& dist,
                      const std::string& model,
                      const std::vector<double>& model_p) {
  FitResult fit;
  fit.model = model;
  fit.nbar = dist.mean;
  fit.residuals.resize(dist.p.size());
  for (std::size_t n = 0; n < dist.p.size(); ++n) {
    fit.residuals[n] = dist.p[n] - model_p[n];
    fit.residual_norm += std::abs(fit.residuals[n]);
  }
  return fit;
}

}  // namespace

FitResult fit_poisson(const hilbert::PhononDistribution& dist) {
  if (dist.p.empty()) throw ConfigError("fit: empty distribution");
  double nbar = dist.mean;
  std::vector<double> model(dist.p.size());
  model[0] = std::exp(-nbar);
  for (std::size_t n = 1; n < model.size(); ++n)
    model[n] = model[n - 1] * nbar / double(n);
  return fit_against(dist, "poisson", model);
}

FitResult fit_geometric(const hilbert::PhononDistribution& dist) {
  if (dist.p.empty()) throw ConfigError("fit: empty distribution");
  double nbar = dist.mean;
  std::vector<double> model(dist.p.size());
  model[0] = 1.0 / (1.0 + nbar);
  for (std::size_t n = 1; n < model.size(); ++n)
    model[n] = model[n - 1] * nbar / (1.0 + nbar);
  return fit_against(dist, "geometric", model);
}

}  // namespace trilin::observe
