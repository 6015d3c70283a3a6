#pragma once

#include <Eigen/Core>
#include <vector>

#include "optexec/cost.hpp"
#include "optexec/report.hpp"

namespace optexec {

/// Configuration of the discrete homotopy solver. The auxiliary linear
/// operator is the identity and the auxiliary function is one; neither is
/// configurable. init must be strictly one-signed (f' and all higher
/// derivatives of the impact must be finite along it).
struct DhamConfig {
  int order = 7;
  std::vector<double> hbar_grid;    // empty -> default_hbar_grid()
  double lambda_tolerance = 1e-3;   // constraint tolerance relative to |X|
  Strategy init;
  bool refine = true;  // one factor-10 local grid pass around the best hbar
};

/// 121 points on [-120, 0); brackets the useful range for the problems in
/// scope, where the deformation step scale is set by 1 / ||G||.
std::vector<double> default_hbar_grid();

/// Homotopy-series terms v^0..v^n for fixed hbar and lambda.
struct DhamState {
  std::vector<Eigen::VectorXd> terms;
  double lambda = 0.0;
  double hbar = 0.0;
  bool diverged = false;

  /// The order-n approximation: the partial sum of the series terms.
  Eigen::VectorXd solution() const;
};

/// The m-th homotopy derivative of the two-argument nonlinearity F (m >= 1),
/// evaluated on the grid from series terms v^0..v^m. The j <= i branch
/// applies the one-variable composition recursion to f; the j > i branch
/// applies the two-variable rule to (u, w) -> u f'(w). The deformation
/// equation for the term v^(m+1) consumes this matrix.
Eigen::MatrixXd homotopy_derivative_F(const std::vector<Eigen::VectorXd>& terms,
                                      const ImpactModel& impact, int m);

/// Runs the deformation recursion to config.order at the given hbar, lambda:
///   v^1 = hbar (-lambda + sum_j G_ij F_ij(v^0)),
///   v^m = v^(m-1) + hbar sum_j G_ij F^(m-1)_ij   (m > 1).
/// Overflow marks the state diverged instead of throwing.
DhamState dham_iterate(const DhamConfig& config, const CostModel& model,
                       double hbar, double lambda);

/// Scalar root-find (secant with expanding-bracket fallback) on the volume
/// defect of the order-n solution. Throws CalibrationError (carrying the
/// best lambda) if no root is bracketed within 60 expansions.
double calibrate_lambda(const DhamConfig& config, const CostModel& model,
                        double hbar);

/// Full solve: for each hbar calibrate lambda, evaluate the squared residual
/// of the order-n solution, pick the hbar minimizing it (ties broken by
/// smaller |hbar|), optionally refine locally once. The report carries the
/// residual curve E^n(hbar).
SolverReport dham_solve(const DhamConfig& config, const CostModel& model);

}  // namespace optexec
