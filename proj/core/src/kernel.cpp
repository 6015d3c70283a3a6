#include "optexec/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace optexec {

Eigen::MatrixXd build_kernel_matrix(double gamma, const GridSpec& grid) {
  grid.validate();
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("build_kernel_matrix: gamma must lie in (0, 1)");
  const int n = grid.N;
  const double q = 2.0 - gamma;
  const double pref = std::pow(grid.dt(), q) / ((1.0 - gamma) * q);

  // Toeplitz by construction: precompute by lag.
  Eigen::VectorXd by_lag(n);
  by_lag[0] = 2.0 * pref;
  for (int k = 1; k < n; ++k)
    by_lag[k] = pref * (std::pow(k + 1.0, q) - 2.0 * std::pow(k, q) + std::pow(k - 1.0, q));

  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = by_lag[std::abs(i - j)];
  return G;
}

Eigen::MatrixXd build_cost_matrix(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols())
    throw std::invalid_argument("build_cost_matrix: G must be square");
  Eigen::MatrixXd A = G.triangularView<Eigen::Lower>();
  A.diagonal() = G.diagonal() / 2.0;
  return A;
}

KernelMatrices make_kernel_matrices(double gamma, const GridSpec& grid) {
  KernelMatrices k;
  k.gamma = gamma;
  k.G = build_kernel_matrix(gamma, grid);
  k.A = build_cost_matrix(k.G);
  return k;
}

Strategy vwap_strategy(const GridSpec& grid) {
  grid.validate();
  return {Eigen::VectorXd::Constant(grid.N, grid.mean_rate()), grid};
}

double gss_normalization_constant(double gamma, double X, double T) {
  return X / (std::sqrt(std::numbers::pi) * std::pow(T / 2.0, gamma) *
              std::tgamma((1.0 + gamma) / 2.0) / std::tgamma(1.0 + gamma / 2.0));
}

Strategy gss_strategy(double gamma, const GridSpec& grid) {
  grid.validate();
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("gss_strategy: gamma must lie in (0, 1)");
  const double c = gss_normalization_constant(gamma, grid.X, grid.T);
  const double e = (1.0 - gamma) / 2.0;
  Eigen::VectorXd v(grid.N);
  for (int i = 1; i <= grid.N; ++i) {
    const double t = grid.midpoint(i);
    v[i - 1] = c / std::pow(t * (grid.T - t), e);
  }
  // The midpoint Riemann sum is slightly off the volume target; rescale so
  // the constraint holds exactly while preserving the profile shape.
  v *= grid.X / (v.sum() * grid.dt());
  return {std::move(v), grid};
}

double vwap_cost_closed_form(const ImpactModel& impact, double gamma,
                             const GridSpec& grid) {
  grid.validate();
  const double rate = grid.mean_rate();
  return grid.X * eval(impact, rate) * std::pow(grid.T, 1.0 - gamma) /
         ((1.0 - gamma) * (2.0 - gamma));
}

}  // namespace optexec
