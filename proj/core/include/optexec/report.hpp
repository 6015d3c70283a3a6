#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "optexec/grid.hpp"

namespace optexec {

/// Outcome of a solver run: the strategy plus enough metadata to audit it.
/// The stored cost is always re-evaluated from the strategy with the exact
/// cost functional, never copied from optimizer internals.
struct SolverReport {
  std::string solver;
  Strategy strategy;
  double cost = 0.0;
  double spread_component = 0.0;
  double constraint_violation = 0.0;
  std::optional<double> squared_residual;
  std::optional<double> hbar;
  std::optional<double> lambda;
  int iterations = 0;
  bool converged = false;
  double stationarity = 0.0;  // projected-gradient norm where applicable
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  std::string message;

  // Solver-specific traces.
  std::vector<std::pair<double, double>> residual_curve;  // (hbar, E^n)
  std::vector<double> mean_field_trace;
};

/// Writes the strategy profile as CSV with header i,t_mid,v_i,volume_i.
void write_profile_csv(const std::string& path, const Strategy& s);

/// Writes a two-column CSV of the residual curve (hbar, squared_residual).
void write_curve_csv(const std::string& path,
                     const std::vector<std::pair<double, double>>& curve);

/// Fixed-format double used in every CSV we emit: shortest representation
/// that round-trips, '.' decimal separator.
std::string format_double(double x);

}  // namespace optexec
