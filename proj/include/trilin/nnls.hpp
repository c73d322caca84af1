#pragma once

#include <Eigen/Core>

namespace trilin::nnls {

// min_x ||A x - y||^2 / 2 + mu * sum(x)  subject to x >= 0,
// by the Lawson-Hanson active-set method on the normal equations.
// Terminates in finitely many steps; throws ConvergenceFailure if the
// iteration cap (40 * cols) is somehow hit first.
Eigen::VectorXd solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                      double mu = 0.0);

// Nonnegative least squares with sum(x) <= bound. The bound is enforced
// through the smallest linear penalty mu >= 0 that brings the sum inside,
// found by bisection; by KKT this is exact, not a soft constraint.
Eigen::VectorXd solve_sum_bounded(const Eigen::MatrixXd& a,
                                  const Eigen::VectorXd& y, double bound);

}  // namespace trilin::nnls
