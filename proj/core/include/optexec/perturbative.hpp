#pragma once

#include <Eigen/Core>

#include "optexec/cost.hpp"
#include "optexec/report.hpp"

namespace optexec {

/// Intermediate quantities of the weak-nonlinearity expansion, exposed for
/// validation: v = v0 + eps * v1 with v1 affine in the multiplier shift.
struct PerturbativeParts {
  Eigen::VectorXd v0;       // discretized linear-case optimum
  Eigen::VectorXd v1;       // first-order correction at the calibrated lambda'
  Eigen::VectorXd w;        // sensitivity dv1/dlambda', solves G w = -1
  double lambda_prime = 0.0;
};

PerturbativeParts perturbative_parts(double gamma, double eps, const GridSpec& grid);

/// First-order solution for f(v) = v^(1-eps), 0 < |eps| << 1: the linear-case
/// profile plus the correction from the discretized linear Fredholm system
///   sum_j G_ij v1_j = sum_{j<=i} G_ij v0_j ln v0_j
///                     + (1 + ln v0_i) sum_{j>i} G_ij v0_j - lambda'.
/// lambda' is fixed in closed form by linear superposition so the volume
/// constraint holds exactly. The reported cost uses the power law d = 1-eps.
SolverReport perturbative_solve(double gamma, double eps, const GridSpec& grid);

}  // namespace optexec
