#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace optexec {

/// Uniform partition of the execution horizon [0, T] into N subintervals,
/// together with the total volume X to execute. X > 0 is a buy program.
struct GridSpec {
  int N = 1;
  double T = 1.0;
  double X = 0.0;

  double dt() const { return T / N; }
  double mean_rate() const { return X / T; }
  /// Feasible rate vectors satisfy sum_i v_i == target_rate_sum().
  double target_rate_sum() const { return static_cast<double>(N) * X / T; }
  /// Midpoint of subinterval i (1-based).
  double midpoint(int i) const { return (i - 0.5) * T / N; }

  void validate() const {
    if (N < 1) throw std::invalid_argument("GridSpec: N must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T))
      throw std::invalid_argument("GridSpec: T must be positive and finite");
    if (!std::isfinite(X)) throw std::invalid_argument("GridSpec: X must be finite");
  }
};

/// Piecewise-constant trading-rate profile: rates[i] is the rate held over
/// subinterval i+1. A feasible strategy executes exactly grid.X shares.
struct Strategy {
  Eigen::VectorXd rates;
  GridSpec grid;

  double executed_volume() const { return rates.sum() * grid.dt(); }
  double constraint_violation() const {
    return std::abs(executed_volume() - grid.X);
  }
};

}  // namespace optexec
