#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "optexec/cost.hpp"
#include "optexec/rng.hpp"
#include "oracles.hpp"

using namespace optexec;

namespace {

CostModel power_model(double gamma, double delta, int N, double spread = 0.0,
                      double X = 0.1, double T = 1.0) {
  const GridSpec grid{N, T, X};
  return make_cost_model(PowerLaw{delta}, make_kernel_matrices(gamma, grid), grid, spread);
}

Eigen::VectorXd random_positive(int n, std::mt19937_64& gen, double scale) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * (0.2 + uniform01(gen));
  return v;
}

}  // namespace

TEST_SUITE("cost") {

TEST_CASE("linear impact reduces to the quadratic form") {
  const CostModel model = power_model(0.5, 1.0, 40);
  std::mt19937_64 gen(11);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd v(40);
    for (int i = 0; i < 40; ++i) v[i] = 0.4 * (uniform01(gen) - 0.3);
    const double quad = 0.5 * v.dot(model.kernels.G * v);
    CHECK(expected_cost(model, v) == doctest::Approx(quad).epsilon(1e-12));
  }
}

TEST_CASE("power-law scaling of the cost") {
  std::mt19937_64 gen(13);
  for (const double delta : {0.5, 0.7, 1.0}) {
    const CostModel model = power_model(0.45, delta, 25);
    const Eigen::VectorXd v = random_positive(25, gen, 0.1);
    const double base = expected_cost(model, v);
    for (const double a : {0.3, 2.0, 7.5}) {
      CHECK(expected_cost(model, Eigen::VectorXd(a * v)) ==
            doctest::Approx(std::pow(a, 1.0 + delta) * base).epsilon(1e-12));
    }
  }
}

TEST_CASE("reported vwap cost at the table point") {
  const CostModel model = power_model(0.5, 0.5, 100);
  const Eigen::VectorXd vwap = Eigen::VectorXd::Constant(100, 0.1);
  CHECK(expected_cost(model, vwap) == doctest::Approx(0.0422).epsilon(1.5e-3));
}

TEST_CASE("spread component: exact for monotone, lower bound otherwise") {
  const double spread = 0.03;
  const CostModel model = power_model(0.45, 0.55, 30, spread);
  const double X = model.grid.X;

  std::mt19937_64 gen(17);
  const Eigen::VectorXd buy = random_positive(30, gen, 0.1);
  const Eigen::VectorXd scaled = buy * (model.grid.target_rate_sum() / buy.sum());
  CHECK(spread_component(model, scaled) == doctest::Approx(spread * X).epsilon(1e-12));

  Eigen::VectorXd mixed = scaled;
  mixed[3] = -mixed[3];
  mixed *= model.grid.target_rate_sum() / mixed.sum();
  CHECK(spread_component(model, mixed) > spread * X);
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937_64 gen(19);
  for (const double spread : {0.0, 0.02}) {
    const CostModel model = power_model(0.5, 0.5, 20, spread);
    const Eigen::VectorXd v = random_positive(20, gen, 0.1);
    const Eigen::VectorXd g = cost_gradient(model, v);
    const Eigen::VectorXd fd = oracles::fd_gradient(
        [&](const Eigen::VectorXd& x) { return expected_cost(model, x); }, v, 1e-7);
    for (int k = 0; k < 20; ++k)
      CHECK(g[k] == doctest::Approx(fd[k]).epsilon(1e-6));
  }
}

TEST_CASE("hessian matches finite differences of the gradient") {
  std::mt19937_64 gen(23);
  const CostModel model = power_model(0.45, 0.6, 15);
  const Eigen::VectorXd v = random_positive(15, gen, 0.1);
  const Eigen::MatrixXd H = cost_hessian(model, v);
  CHECK((H - H.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
  for (int k = 0; k < 15; ++k) {
    Eigen::VectorXd vp = v, vm = v;
    const double h = 1e-6;
    vp[k] += h;
    vm[k] -= h;
    const Eigen::VectorXd col =
        (cost_gradient(model, vp) - cost_gradient(model, vm)) / (2.0 * h);
    for (int l = 0; l < 15; ++l)
      CHECK(H(l, k) == doctest::Approx(col[l]).epsilon(1e-5));
  }
}

TEST_CASE("linear-impact gradient and hessian are G v and G") {
  const CostModel model = power_model(0.5, 1.0, 12);
  std::mt19937_64 gen(29);
  const Eigen::VectorXd v = random_positive(12, gen, 0.2);
  const Eigen::VectorXd g = cost_gradient(model, v);
  const Eigen::VectorXd Gv = model.kernels.G * v;
  for (int k = 0; k < 12; ++k) CHECK(g[k] == doctest::Approx(Gv[k]).epsilon(1e-12));
  const Eigen::MatrixXd H = cost_hessian(model, v);
  CHECK((H - model.kernels.G).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("single-interval gradient closed form") {
  const CostModel model = power_model(0.5, 0.5, 1);
  const double A11 = model.kernels.A(0, 0);
  for (const double v1 : {0.05, 0.3, 1.2}) {
    Eigen::VectorXd v(1);
    v << v1;
    CHECK(cost_gradient(model, v)[0] ==
          doctest::Approx(1.5 * A11 * std::sqrt(v1)).epsilon(1e-12));
  }
}

TEST_CASE("hessian diagonal can go negative under concave impact") {
  const CostModel model = power_model(0.5, 0.5, 100);
  const Eigen::VectorXd vwap = Eigen::VectorXd::Constant(100, 0.1);
  const Eigen::MatrixXd H = cost_hessian(model, vwap);
  CHECK(H.diagonal().minCoeff() < 0.0);  // nonconvexity witness
}

TEST_CASE("F matrix branches") {
  SUBCASE("linear impact collapses both branches") {
    Eigen::VectorXd v(3);
    v << 0.3, -0.1, 0.7;
    const Eigen::MatrixXd F = build_F_matrix(PowerLaw{1.0}, v);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(F(i, j) == doctest::Approx(v[j]));
  }
  SUBCASE("constant positive rates") {
    const double c = 0.49;
    Eigen::VectorXd v = Eigen::VectorXd::Constant(4, c);
    const Eigen::MatrixXd F = build_F_matrix(PowerLaw{0.5}, v);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double want = j <= i ? std::sqrt(c) : 0.5 * std::sqrt(c);
        CHECK(F(i, j) == doctest::Approx(want).epsilon(1e-12));
      }
  }
  SUBCASE("two-point worked example") {
    Eigen::VectorXd v(2);
    v << 1.0, 4.0;
    const Eigen::MatrixXd F = build_F_matrix(PowerLaw{0.5}, v);
    CHECK(F(0, 0) == doctest::Approx(1.0));
    CHECK(F(0, 1) == doctest::Approx(2.0));
    CHECK(F(1, 0) == doctest::Approx(1.0));
    CHECK(F(1, 1) == doctest::Approx(2.0));
  }
}

TEST_CASE("urysohn residual vanishes on the linear solution") {
  const CostModel model = power_model(0.5, 1.0, 30);
  const double lambda = 1.0;
  const Eigen::VectorXd v =
      model.kernels.G.ldlt().solve(Eigen::VectorXd::Constant(30, lambda));
  const UrysohnResidual r = urysohn_residual(model.impact, model.kernels, v, lambda);
  CHECK(r.squared < 1e-24);
}

TEST_CASE("urysohn residual is positive at vwap under concave impact") {
  const CostModel model = power_model(0.5, 0.5, 50);
  const Eigen::VectorXd vwap = Eigen::VectorXd::Constant(50, 0.1);
  // best-fit lambda minimizes the squared residual
  const Eigen::MatrixXd F = build_F_matrix(model.impact, vwap);
  const double lambda = (model.kernels.G.cwiseProduct(F)).rowwise().sum().mean();
  CHECK(urysohn_residual(model.impact, model.kernels, vwap, lambda).squared > 1e-10);
}

TEST_CASE("toy cost equals the matrix cost on two-interval grids") {
  const double gamma = 0.5, X = 0.1;
  std::mt19937_64 gen(31);
  for (const double delta : {0.5, 0.8, 1.0}) {
    const CostModel model = power_model(gamma, delta, 2, 0.0, X, 1.0);
    for (int k = 0; k < 100; ++k) {
      const double v1 = 4.0 * X * (uniform01(gen) - 0.5);
      Eigen::VectorXd v(2);
      v << v1, 2.0 * X - v1;
      const double via_matrix = expected_cost(model, v);
      const double via_toy = toy_cost(v1, gamma, delta, X);
      CHECK(via_matrix == doctest::Approx(via_toy).epsilon(1e-12));
    }
  }
}

TEST_CASE("toy cost at the vwap point reproduces the closed form") {
  CHECK(toy_cost(0.1, 0.5, 1.0, 0.1) == doctest::Approx(0.0133333).epsilon(1e-5));
}

TEST_CASE("toy global minimizer changes sign near delta = 0.56") {
  CHECK(toy_global_minimizer(0.5, 0.5, 0.1) < 0.0);
  CHECK(toy_global_minimizer(0.5, 0.7, 0.1) > 0.0);
  const double dstar = toy_sign_transition_delta(0.5, 0.1);
  CHECK(dstar == doctest::Approx(0.56).epsilon(0.04));
}

TEST_CASE("spread coefficient") {
  CHECK(spread_coefficient(0.0, 0.45, PowerLaw{0.55}, 0.1, 1.0) == 0.0);
  const double d1 = spread_coefficient(0.1, 0.45, PowerLaw{0.55}, 0.1, 1.0);
  CHECK(d1 == doctest::Approx(0.0330601).epsilon(1e-5));
  CHECK(spread_coefficient(0.5, 0.45, PowerLaw{0.55}, 0.1, 1.0) ==
        doctest::Approx(5.0 * d1).epsilon(1e-12));
}

}  // TEST_SUITE
