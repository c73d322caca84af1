#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trilin/hilbert.hpp"

namespace trilin::observe {

// Sideband flopping on the carrier-adjacent transitions of one mode.
// Probe Rabi frequency omega0 is angular (rad/s); times in seconds.
enum class SidebandKind { blue, red };

struct SidebandSignal {
  SidebandKind kind = SidebandKind::blue;
  hilbert::Mode mode = hilbert::Mode::a;
  double omega0 = 0.0;           // bare probe Rabi frequency, rad/s
  std::vector<double> times;     // s, strictly increasing
  std::vector<double> excited;   // excitation probability per time
};

// Exponential contrast decay applied to the oscillatory part,
// exp(-gamma0 (n+1)^power t). Disabled when gamma0 == 0.
struct EnvelopeParams {
  double gamma0 = 0.0;  // 1/s
  double power = 0.7;
};

// Ideal sideband signal of a phonon distribution:
//   blue: P(t) = sum_n p_n sin^2(sqrt(n+1) omega0 t / 2)
//   red:  P(t) = sum_{n>=1} p_n sin^2(sqrt(n) omega0 t / 2)
SidebandSignal synthesize_sideband(const hilbert::PhononDistribution& dist,
                                   SidebandKind kind, double omega0,
                                   std::vector<double> times,
                                   const EnvelopeParams& envelope = {});

enum class InversionMethod { nnls, fourier };

struct ReconstructionDiagnostics {
  bool nyquist_ok = false;   // sampling resolves the fastest retained sideband
  double max_dt = 0.0;       // coarsest grid spacing, s
  double nyquist_dt = 0.0;   // spacing needed for the fastest component, s
  double condition_number = 0.0;
  double residual_l2 = 0.0;  // ||A p - y|| over the fit window
};

struct Reconstruction {
  hilbert::PhononDistribution distribution;
  ReconstructionDiagnostics diagnostics;
};

// Recovers p_0..p_{n_cut} from a sideband signal. The default solves a
// nonnegativity- and sum-constrained least squares problem (sum p <= 1);
// InversionMethod::fourier instead projects onto the sideband cosines and
// clips at zero, which is cheaper but leaks between the incommensurate
// frequencies. Throws IllConditioned when the design matrix condition
// number exceeds 1e8. For a red signal p_0 never enters the model; it is
// reported as 1 - sum of the recovered p_{n>=1}, floored at zero.
Reconstruction reconstruct_distribution(const SidebandSignal& signal, int n_cut,
                                        InversionMethod method = InversionMethod::nnls);

struct FitResult {
  std::string model;  // "poisson" or "geometric"
  double nbar = 0.0;
  double residual_norm = 0.0;     // sum of |p_n - model_n|
  std::vector<double> residuals;  // p_n - model_n
};

// Poisson fit by moment matching (nbar = mean), which is also the maximum
// likelihood assignment for a Poisson family.
FitResult fit_poisson(const hilbert::PhononDistribution& dist);

// Thermal (geometric) fit by moment matching:
// model_n = nbar^n / (1 + nbar)^(n+1).
FitResult fit_geometric(const hilbert::PhononDistribution& dist);

}  // namespace trilin::observe
