#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optexec/optimize.hpp"
#include "optexec/problem.hpp"

namespace optexec {

struct RunOutcome {
  SolverReport report;
  std::optional<MultistartResult> multistart;  // populated by the start-based solvers
};

/// Dispatches a validated spec to the configured solver.
RunOutcome run_problem(const ProblemSpec& spec);

/// run_problem plus every configured file output. Returns 0 when the solver
/// converged and 2 when it did not (usage errors throw before this point).
int run_to_files(const ProblemSpec& spec);

struct ReproduceOptions {
  bool quick = false;                // shrink start counts and scan grids
  std::uint64_t seed = 12345;
  int workers = 0;
  std::string out_dir = ".";
  int starts_override = 0;           // 0 -> table default
  std::vector<double> gamma_list;    // cost_surface only
  std::vector<double> delta_list;
};

/// Reruns one of the published experiments and writes CSV artifacts with
/// reference values beside computed ones. table_id is one of: costs_main,
/// costs_optimizers, concave_convex, distance_matrix, dang_region,
/// cost_surface. Per-cell solver failures are recorded in the CSV, not
/// raised.
int reproduce(const std::string& table_id, const ReproduceOptions& opts);

std::vector<std::string> reproduce_table_ids();

}  // namespace optexec
