#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "optexec/cost.hpp"
#include "optexec/report.hpp"

namespace optexec {

/// Fixed-point iteration on the linearized stationarity system. The impact
/// function is the perturbed power law (epsilon + |v|)^delta so the map
/// stays defined across v = 0.
struct DangConfig {
  double epsilon = 1e-6;
  int max_iterations = 500;
  int mean_field_window = 20;
  double rel_std_threshold = 1e-9;
  double lambda_tolerance = 1e-3;  // constraint tolerance relative to |X|

  void validate() const;
};

/// Constant initial guess: the scalar v > 0 solving
/// v f'(v) sum_j G_1j = lambda (bracketed root-find).
/// Throws SearchError if no positive root exists.
Strategy dang_initial_guess(double lambda, const ImpactModel& impact,
                            const KernelMatrices& kernels, const GridSpec& grid);

/// One application of the map M: solves K v' = c with
///   K_ij = G_ij F'_ij(v),
///   c_i  = lambda - sum_{j<=i} G_ij (F_ij(v) - v_j F'_ij(v)),
/// where F'_ij = f'(v_j) for j <= i and f'(v_i) for j > i.
/// Throws SearchError if K is numerically singular.
Eigen::VectorXd dang_map(const Eigen::VectorXd& v, double lambda,
                         const ImpactModel& impact, const Eigen::MatrixXd& G);

/// Full solve: inner fixed-point iteration monitored through the mean field
/// (converged when the relative standard deviation over a trailing window
/// drops below the threshold), outer scalar root-find on lambda for the
/// volume constraint. Non-convergence is reported, not thrown.
SolverReport dang_solve(const DangConfig& config, const CostModel& model,
                        const std::optional<Strategy>& init = std::nullopt);

struct ScanCell {
  int N = 0;
  double delta = 0.0;
  bool converged = false;
  int iterations = 0;
  double squared_residual = 0.0;
};

/// Convergence-region scan over (N, delta). Each cell runs dang_solve from
/// the constant initial guess plus up to `random_starts` simplex-random
/// guesses; the cell converges when any run finds the fixed point. Failures
/// are data, not errors.
std::vector<ScanCell> convergence_scan(const std::vector<int>& N_list,
                                       const std::vector<double>& delta_list,
                                       double gamma, double T, double X,
                                       const DangConfig& config,
                                       int random_starts = 0,
                                       std::uint64_t seed = 0, int workers = 0);

/// Writes scan results as CSV with header N,delta,converged,iterations,squared_residual.
void write_scan_csv(const std::string& path, const std::vector<ScanCell>& cells);

}  // namespace optexec
