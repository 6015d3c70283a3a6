#include <doctest.h>

#include <cmath>
#include <random>

#include "optexec/errors.hpp"
#include "optexec/impact.hpp"
#include "oracles.hpp"

using namespace optexec;

TEST_SUITE("impact") {

TEST_CASE("power-law evaluation") {
  const ImpactModel m = PowerLaw{0.5};
  CHECK(eval(m, 0.01) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(eval(m, -2.0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(eval(PowerLaw{1.0}, 0.37) == doctest::Approx(0.37));
  CHECK(eval(m, 0.0) == 0.0);
  CHECK_THROWS_AS(eval(m, std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("concave-convex evaluation") {
  const ImpactModel m = ConcaveConvex{1.0, 0.55, 0.1, 1.0};
  // (1/2)^0.55 + 0.1 * 2
  CHECK(eval(m, 1.0) == doctest::Approx(0.8830201284).epsilon(1e-9));
}

TEST_CASE("odd symmetry is exact") {
  const ImpactModel models[] = {ImpactModel{PowerLaw{0.5}},
                                ImpactModel{PerturbedPowerLaw{0.7, 1e-5}},
                                ImpactModel{ConcaveConvex{1.0, 0.55, 0.3, 1.0}}};
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (const auto& m : models)
    for (int k = 0; k < 200; ++k) {
      const double v = u(gen);
      CHECK(eval(m, -v) == -eval(m, v));  // bit-for-bit
    }
}

TEST_CASE("first derivatives") {
  CHECK(deriv(PowerLaw{1.0}, -3.3) == doctest::Approx(1.0));
  CHECK(deriv(PowerLaw{0.5}, 0.04) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(deriv(PerturbedPowerLaw{0.5, 1e-6}, 0.0) == doctest::Approx(500.0).epsilon(1e-12));
  CHECK_THROWS_AS(deriv(PowerLaw{0.5}, 0.0), SingularityError);
  CHECK_THROWS_AS(deriv(ConcaveConvex{1.0, 0.55, 0.1, 1.0}, 0.0), SingularityError);
}

TEST_CASE("second derivatives") {
  CHECK(second_deriv(PowerLaw{1.0}, 0.3) == 0.0);
  CHECK(second_deriv(PowerLaw{0.5}, 1.0) == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK_THROWS_AS(second_deriv(PowerLaw{0.5}, 0.0), SingularityError);
  // sign change of f'' at the published inflection rate
  const ConcaveConvex cc{1.0, 0.55, 0.1, 1.0};
  const double vstar = 1.0755;
  CHECK(second_deriv(ImpactModel{cc}, vstar - 1e-3) < 0.0);
  CHECK(second_deriv(ImpactModel{cc}, vstar + 1e-3) > 0.0);
}

TEST_CASE("derivatives agree with finite differences") {
  const ImpactModel models[] = {ImpactModel{PowerLaw{0.5}},
                                ImpactModel{PowerLaw{1.0}},
                                ImpactModel{PerturbedPowerLaw{0.6, 1e-4}},
                                ImpactModel{ConcaveConvex{1.3, 0.55, 0.4, 0.7}}};
  for (const auto& m : models) {
    for (const double v : {1e-3, 1e-2, 0.2, 1.0, 3.7, 10.0}) {
      const double h = 1e-6 * std::max(std::abs(v), 1e-2);
      const double fd1 =
          oracles::central_diff([&](double x) { return eval(m, x); }, v, h);
      CHECK(deriv(m, v) == doctest::Approx(fd1).epsilon(1e-6));
      const double fd2 =
          oracles::central_diff([&](double x) { return deriv(m, x); }, v, h);
      CHECK(second_deriv(m, v) == doctest::Approx(fd2).epsilon(1e-6));
    }
  }
}

TEST_CASE("higher derivatives match finite differences of the previous order") {
  const ImpactModel models[] = {ImpactModel{PowerLaw{0.5}},
                                ImpactModel{PerturbedPowerLaw{0.7, 1e-3}},
                                ImpactModel{ConcaveConvex{1.0, 0.55, 0.2, 1.0}}};
  for (const auto& m : models) {
    for (const double v : {0.08, 0.5, 2.0, -0.6}) {
      const auto d = derivatives_at(m, v, 6);
      CHECK(d[0] == doctest::Approx(eval(m, v)).epsilon(1e-12));
      CHECK(d[1] == doctest::Approx(deriv(m, v) * (1.0)).epsilon(1e-10));
      CHECK(d[2] == doctest::Approx(second_deriv(m, v)).epsilon(1e-10));
      for (int k = 3; k <= 6; ++k) {
        const double h = 1e-4 * std::max(std::abs(v), 1e-2);
        const double fd = oracles::central_diff(
            [&](double x) { return derivatives_at(m, x, k - 1)[k - 1]; }, v, h);
        CHECK(d[k] == doctest::Approx(fd).epsilon(1e-4));
      }
    }
  }
  CHECK_THROWS_AS(derivatives_at(PowerLaw{0.5}, 0.0, 3), SingularityError);
}

TEST_CASE("perturbation limit") {
  const double v = 0.3;
  const double base = eval(PowerLaw{0.5}, v);
  const double d4 = std::abs(eval(PerturbedPowerLaw{0.5, 1e-4}, v) - base);
  const double d8 = std::abs(eval(PerturbedPowerLaw{0.5, 1e-8}, v) - base);
  CHECK(d8 < d4);
  CHECK(d8 < 1e-7);
}

TEST_CASE("inflection rates match the published values") {
  CHECK(inflection_rate({1.0, 0.55, 0.1, 1.0}) == doctest::Approx(1.0755).epsilon(1e-3));
  CHECK(inflection_rate({1.0, 0.55, 0.5, 1.0}) == doctest::Approx(0.4256).epsilon(1e-3));
  CHECK(inflection_rate({1.0, 0.55, 1.0, 1.0}) == doctest::Approx(0.2678).epsilon(1e-3));
  CHECK(inflection_rate({1.0, 0.55, 2.0, 1.0}) == doctest::Approx(0.1639).epsilon(1e-3));
  CHECK_THROWS_AS(inflection_rate({1.0, 0.55, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("concave-convex sign structure of f''") {
  const ConcaveConvex cc{1.0, 0.55, 0.5, 1.0};
  const double vstar = inflection_rate(cc);
  const ImpactModel m = cc;
  for (int k = 1; k <= 40; ++k) {
    const double below = vstar * k / 41.0;
    CHECK(second_deriv(m, below) < 0.0);
  }
  for (double v = vstar * 1.01; v < 20.0; v *= 1.4) CHECK(second_deriv(m, v) > 0.0);
}

}  // TEST_SUITE
