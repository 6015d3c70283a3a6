#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "optexec/dham.hpp"
#include "optexec/perturbative.hpp"

using namespace optexec;

TEST_SUITE("perturbative") {

TEST_CASE("zeroth order returns the discretized linear profile") {
  const GridSpec grid{64, 1.0, 0.1};
  const SolverReport r = perturbative_solve(0.5, 0.0, grid);
  const Strategy gss = gss_strategy(0.5, grid);
  for (int i = 0; i < grid.N; ++i)
    CHECK(r.strategy.rates[i] == doctest::Approx(gss.rates[i]).epsilon(1e-14));
}

TEST_CASE("correction is affine in the multiplier with slope G^-1(-1)") {
  const GridSpec grid{40, 1.0, 0.1};
  const PerturbativeParts parts = perturbative_parts(0.5, 0.02, grid);
  const Eigen::MatrixXd G = build_kernel_matrix(0.5, grid);
  // G w = -1 at machine precision
  CHECK((G * parts.w + Eigen::VectorXd::Ones(grid.N)).lpNorm<Eigen::Infinity>() < 1e-10);
  // and the calibrated v1 sums to zero so the constraint holds exactly
  CHECK(std::abs(parts.v1.sum()) < 1e-9);
}

TEST_CASE("constraint met well within one permille") {
  for (const double eps : {0.01, 0.02, 0.05}) {
    const GridSpec grid{80, 1.0, 0.1};
    const SolverReport r = perturbative_solve(0.5, eps, grid);
    CHECK(r.constraint_violation <= 1e-3 * grid.X);
  }
}

TEST_CASE("concave correction front-loads; convex back-loads") {
  const GridSpec grid{128, 1.0, 0.1};
  const SolverReport concave = perturbative_solve(0.5, 0.02, grid);
  const Eigen::VectorXd& vc = concave.strategy.rates;
  CHECK(vc.head(64).mean() > vc.tail(64).mean());

  const SolverReport convex = perturbative_solve(0.5, -0.02, grid);
  const Eigen::VectorXd& vx = convex.strategy.rates;
  CHECK(vx.tail(64).mean() > vx.head(64).mean());
}

TEST_CASE("correction scales linearly in eps") {
  const GridSpec grid{64, 1.0, 0.1};
  const Eigen::VectorXd v0 = gss_strategy(0.5, grid).rates;
  auto dev = [&](double eps) {
    return (perturbative_solve(0.5, eps, grid).strategy.rates - v0)
        .lpNorm<Eigen::Infinity>();
  };
  const double d1 = dev(0.01), d2 = dev(0.02), d4 = dev(0.04);
  CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(d4 / d2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("agrees with the homotopy solver in the weak regime") {
  const double eps = 0.05;  // delta = 0.95
  const GridSpec grid{100, 1.0, 0.1};
  const SolverReport pert = perturbative_solve(0.5, eps, grid);

  const CostModel model =
      make_cost_model(PowerLaw{1.0 - eps}, make_kernel_matrices(0.5, grid), grid);
  DhamConfig cfg;
  cfg.order = 7;
  cfg.init = gss_strategy(0.5, grid);
  const SolverReport dham = dham_solve(cfg, model);
  REQUIRE(dham.converged);
  CHECK(std::abs(pert.cost - dham.cost) / std::abs(dham.cost) < 0.02);
}

}  // TEST_SUITE
