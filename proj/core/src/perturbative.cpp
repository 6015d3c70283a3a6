#include "optexec/perturbative.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace optexec {

PerturbativeParts perturbative_parts(double gamma, double eps, const GridSpec& grid) {
  grid.validate();
  if (!(grid.X > 0.0))
    throw std::invalid_argument("perturbative: buy program required (X > 0)");
  const Strategy v0s = gss_strategy(gamma, grid);
  const Eigen::VectorXd& v0 = v0s.rates;
  if (!(v0.array() > 0.0).all())
    throw std::invalid_argument("perturbative: zeroth-order profile must be positive");

  const Eigen::MatrixXd G = build_kernel_matrix(gamma, grid);
  const int n = grid.N;

  Eigen::VectorXd rhs0(n);
  const Eigen::VectorXd lv = v0.array().log();
  for (int i = 0; i < n; ++i) {
    double past = 0.0, future = 0.0;
    for (int j = 0; j <= i; ++j) past += G(i, j) * v0[j] * lv[j];
    for (int j = i + 1; j < n; ++j) future += G(i, j) * v0[j];
    rhs0[i] = past + (1.0 + lv[i]) * future;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("perturbative: kernel matrix not positive definite");

  PerturbativeParts parts;
  parts.v0 = v0;
  parts.w = llt.solve(Eigen::VectorXd::Constant(n, -1.0));
  const Eigen::VectorXd v1_at_zero = llt.solve(rhs0);
  // v1(lambda') = v1(0) + lambda' w; the constraint needs sum v1 = 0 because
  // v0 already executes X exactly.
  parts.lambda_prime = -v1_at_zero.sum() / parts.w.sum();
  parts.v1 = v1_at_zero + parts.lambda_prime * parts.w;
  return parts;
}

SolverReport perturbative_solve(double gamma, double eps, const GridSpec& grid) {
  const auto t_start = std::chrono::steady_clock::now();
  const PerturbativeParts parts = perturbative_parts(gamma, eps, grid);

  Strategy out{parts.v0 + eps * parts.v1, grid};
  const ImpactModel impact = PowerLaw{1.0 - eps};
  const CostModel model =
      make_cost_model(impact, make_kernel_matrices(gamma, grid), grid);

  SolverReport report;
  report.solver = "perturbative";
  report.converged = true;
  report.lambda = parts.lambda_prime;
  report.iterations = 1;
  report.cost = expected_cost(model, out.rates);
  report.constraint_violation = out.constraint_violation();
  report.strategy = std::move(out);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace optexec
