#pragma once

#include <array>
#include <vector>

namespace optexec::tables {

// Published reference values for the model family in scope. The reproduce
// harness prints them next to computed values so deviations are
// self-documenting.

struct CostRow {
  double delta;
  double vwap;
  double gss;
  double dham;
};

/// Strategy costs (VWAP / linear-case profile / homotopy solution) at
/// N = 100, X = 0.1, T = 1, order-7 homotopy with the linear-case profile
/// as initial guess.
const std::vector<CostRow>& reference_costs(double gamma);

struct OptimizerRow {
  double delta;
  double dham;
  double sqp;
  double direct;
};

/// Best costs from 1000-start constrained minimization (free-sign and
/// monotone) next to the homotopy solution, same problem sizes.
const std::vector<OptimizerRow>& reference_optimizer_costs(double gamma);

struct ConcaveConvexRow {
  double d;
  double vstar;
  double mean_positive_rate;
  double std_positive_rate;
  double cost_sqp;
  double cost_vwap;
};

/// Concave-convex impact study at gamma = 0.45, delta = 0.55, N = 100.
const std::vector<ConcaveConvexRow>& reference_concave_convex();

/// Pairwise volume-space distances of the four lowest-cost free-sign minima
/// (gamma = delta = 0.5) with VWAP as the fifth entry.
const std::array<std::array<double, 5>, 5>& reference_distance_matrix();

struct DhamHeadline {
  const char* init;
  double hbar;
  double squared_residual;
};

/// Optimal convergence-control parameters at gamma = delta = 0.5, N = 100.
const std::vector<DhamHeadline>& reference_dham_headline();

/// Reference spread-regularized best costs at gamma = 0.45, delta = 0.55:
/// r = 0.5 -> 0.026, r = 0.1 -> 5.9e-3.
double reference_spread_cost(double r);

}  // namespace optexec::tables
