#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "optexec/landscape.hpp"
#include "optexec/linalg.hpp"
#include "optexec/optimize.hpp"
#include "optexec/rng.hpp"
#include "oracles.hpp"

using namespace optexec;

namespace {

CostModel power_model(double gamma, double delta, int N, double X = 0.1) {
  const GridSpec grid{N, 1.0, X};
  return make_cost_model(PowerLaw{delta}, make_kernel_matrices(gamma, grid), grid);
}

}  // namespace

TEST_SUITE("landscape") {

TEST_CASE("linear optimum classifies as a minimum") {
  const CostModel model = power_model(0.5, 1.0, 20);
  Eigen::VectorXd v = model.kernels.G.ldlt().solve(Eigen::VectorXd::Ones(20));
  v *= model.grid.target_rate_sum() / v.sum();
  CHECK(classify_stationary_point(model, {v, model.grid}) == StationaryClass::minimum);
}

TEST_CASE("non-stationary input is rejected") {
  const CostModel model = power_model(0.5, 1.0, 10);
  const Strategy vwap = vwap_strategy(model.grid);
  CHECK_THROWS_AS(classify_stationary_point(model, vwap), std::invalid_argument);
}

TEST_CASE("both interior toy stationary points are minima") {
  const CostModel model = power_model(0.5, 0.5, 2);
  OptimizerOptions opts;
  opts.starts = 16;
  opts.seed = 2;
  const MultistartResult res = multistart_minimize(model, opts);
  REQUIRE(res.extrema.size() >= 1);
  for (const auto& e : res.extrema) {
    CHECK(classify_stationary_point(model, e.strategy) == StationaryClass::minimum);
    // 1-D oracle: positive second derivative of the reduced toy cost
    const double v1 = e.strategy.rates[0];
    const double h = 1e-5;
    const double c2 = (toy_cost(v1 + h, 0.5, 0.5, 0.1) - 2.0 * toy_cost(v1, 0.5, 0.5, 0.1) +
                       toy_cost(v1 - h, 0.5, 0.5, 0.1)) /
                      (h * h);
    CHECK(c2 > 0.0);
  }
}

TEST_CASE("projected test agrees with the bordered-Hessian chain on small instances") {
  std::mt19937_64 gen(47);
  for (const int n : {2, 3}) {
    const CostModel model = power_model(0.5, 0.6, n);
    OptimizerOptions opts;
    opts.starts = 10;
    opts.seed = 200 + n;
    const MultistartResult res = multistart_minimize(model, opts);
    for (const auto& e : res.extrema) {
      const Eigen::MatrixXd H = cost_hessian(model, e.strategy.rates);
      const int chain = oracles::bordered_hessian_classify(H);
      const StationaryClass cls = classify_stationary_point(model, e.strategy);
      if (chain == 1) CHECK(cls == StationaryClass::minimum);
      if (chain == -1) CHECK(cls == StationaryClass::maximum);
      if (chain == 0)
        CHECK((cls == StationaryClass::saddle || cls == StationaryClass::indeterminate));
    }
    // synthetic saddles: random symmetric Hessians with mixed projected signs
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::MatrixXd M(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = 2.0 * uniform01(gen) - 1.0;
      const Eigen::MatrixXd H = 0.5 * (M + M.transpose());
      const Eigen::MatrixXd Z = zero_sum_basis(n);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z.transpose() * H * Z);
      const auto& eig = es.eigenvalues();
      const int chain = oracles::bordered_hessian_classify(H);
      const bool all_pos = (eig.array() > 0.0).all();
      const bool all_neg = (eig.array() < 0.0).all();
      if (chain == 1) CHECK(all_pos);
      if (chain == -1) CHECK(all_neg);
      if (all_pos) CHECK(chain == 1);
      if (all_neg) CHECK(chain == -1);
    }
  }
}

TEST_CASE("classification is invariant under tangent-basis rotation") {
  const CostModel model = power_model(0.5, 1.0, 8);
  Eigen::VectorXd v = model.kernels.G.ldlt().solve(Eigen::VectorXd::Ones(8));
  v *= model.grid.target_rate_sum() / v.sum();
  const Eigen::MatrixXd H = cost_hessian(model, v);
  const Eigen::MatrixXd Z = zero_sum_basis(8);
  std::mt19937_64 gen(53);
  Eigen::MatrixXd R(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) R(i, j) = 2.0 * uniform01(gen) - 1.0;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(R);
  const Eigen::MatrixXd Q = qr.householderQ();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(Z.transpose() * H * Z);
  const Eigen::MatrixXd Zr = Z * Q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(Zr.transpose() * H * Zr);
  for (int k = 0; k < 7; ++k)
    CHECK(e1.eigenvalues()[k] == doctest::Approx(e2.eigenvalues()[k]).epsilon(1e-9));
}

TEST_CASE("spectrum matches a direct dense eigendecomposition") {
  const CostModel model = power_model(0.5, 1.0, 15);
  Eigen::VectorXd v = model.kernels.G.ldlt().solve(Eigen::VectorXd::Ones(15));
  v *= model.grid.target_rate_sum() / v.sum();
  const SpectrumResult sp = spectrum(model, {v, model.grid});
  const Eigen::MatrixXd Z = zero_sum_basis(15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      Z.transpose() * cost_hessian(model, v) * Z);
  Eigen::VectorXd want = es.eigenvalues().reverse();
  REQUIRE(sp.eigenvalues.size() == want.size());
  for (int k = 0; k < want.size(); ++k)
    CHECK(sp.eigenvalues[k] == doctest::Approx(want[k]).epsilon(1e-8));
  CHECK((sp.eigenvalues.array() > 0.0).all());
}

TEST_CASE("distance matrix is a metric in volume units") {
  const GridSpec grid{10, 2.0, 0.1};
  std::mt19937_64 gen(59);
  std::vector<Strategy> s;
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd v(10);
    for (int i = 0; i < 10; ++i) v[i] = uniform01(gen);
    s.push_back({v, grid});
  }
  const Eigen::MatrixXd D = distance_matrix(s);
  CHECK(D.diagonal().lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((D - D.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c) CHECK(D(a, c) <= D(a, b) + D(b, c) + 1e-12);
  // dt scaling
  CHECK(D(0, 1) == doctest::Approx((s[0].rates - s[1].rates).norm() * grid.dt()));
}

TEST_CASE("summarize: moments and degenerate spread") {
  std::vector<ExtremumRecord> recs(4);
  for (int k = 0; k < 4; ++k) {
    recs[k].cost = 0.01;  // one repeated minimum
    recs[k].classification = StationaryClass::minimum;
  }
  const LandscapeStats st = summarize(recs);
  CHECK(st.stddev == 0.0);
  CHECK(st.fraction_minima == 1.0);
  CHECK(st.negative_cost_minima == 0);

  recs[1].cost = -0.02;
  const LandscapeStats st2 = summarize(recs);
  CHECK(st2.negative_cost_minima == 1);
  CHECK(st2.stddev > 0.0);

  std::vector<ExtremumRecord> single(1);
  single[0].classification = StationaryClass::minimum;
  CHECK_THROWS_AS(summarize(single), std::invalid_argument);
}

}  // TEST_SUITE
