#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optexec/cost.hpp"
#include "optexec/report.hpp"

namespace optexec {

struct OptimizerOptions {
  int max_iterations = 2000;
  /// Projected-gradient norm below which a point counts as stationary.
  /// Negative means default_gradient_tolerance(model).
  double gradient_tolerance = -1.0;
  /// Pattern-search mesh floor, relative to X/T.
  double step_tolerance = 1e-8;
  std::uint64_t seed = 12345;
  int starts = 1;
  bool monotone = false;  // restrict to v_i >= 0 (direct search)
  int workers = 0;        // 0 -> OPTEXEC_THREADS / hardware
  /// Extrema closer than this relative distance are merged.
  double dedup_tolerance = 1e-6;

  void validate() const;
};

/// `count` starting points uniform on the simplex scaled to the constraint
/// hyperplane (sum v_i = N X / T). Deterministic sequence for a given seed.
std::vector<Strategy> sample_start_points(int count, const GridSpec& grid,
                                          std::uint64_t seed);

/// 1e-9 times the l1 norm of the cost gradient at the constant-rate point:
/// the stationarity tolerance used when OptimizerOptions leaves it negative.
double default_gradient_tolerance(const CostModel& model);

/// Local minimization of the expected cost subject to the volume constraint.
/// The constraint is eliminated exactly through the zero-sum null space and
/// the reduced problem is driven by BFGS with an Armijo line search; the run
/// converges when the projected gradient norm drops below tolerance.
SolverReport local_minimize(const CostModel& model, const Strategy& start,
                            const OptimizerOptions& opts);

struct MultistartResult {
  SolverReport best;                  // lowest cost among converged starts
  std::vector<SolverReport> all;      // one report per start, in start order
  std::vector<SolverReport> extrema;  // deduplicated converged extrema, by cost
};

/// Runs local_minimize (or the monotone direct search when opts.monotone)
/// from opts.starts sampled points. Deterministic for a fixed seed and start
/// count, independent of worker count and execution order.
MultistartResult multistart_minimize(const CostModel& model, const OptimizerOptions& opts);

/// Derivative-free generating-set search restricted to the simplex
/// {v_i >= 0, sum v_i = N X / T}: polls the pairwise exchange directions
/// +-(e_i - e_j) scaled by the mesh, accepts the first improving move in a
/// deterministic sweep, halves the mesh after a full unsuccessful sweep and
/// stops when it falls below step_tolerance * X / T. Iterates never leave
/// the simplex; the exact (unsmoothed) cost is used throughout.
SolverReport monotone_minimize_gss(const CostModel& model, const Strategy& start,
                                   const OptimizerOptions& opts);

/// Writes per-start results as CSV with header
/// start_id,converged,cost,stationarity,iterations.
void write_starts_csv(const std::string& path, const std::vector<SolverReport>& reports);

}  // namespace optexec
