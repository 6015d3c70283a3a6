#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "optexec/cost.hpp"
#include "optexec/report.hpp"

namespace optexec {

enum class StationaryClass { minimum, saddle, maximum, indeterminate };

std::string to_string(StationaryClass c);

/// Second-order test of an (approximately) stationary point: eigenvalues of
/// the cost Hessian projected onto the constraint tangent space (zero-sum
/// vectors). All positive -> minimum, all negative -> maximum, mixed ->
/// saddle, any within tol_eig of zero -> indeterminate. This is the
/// numerically robust equivalent of the bordered-Hessian determinant chain.
/// Throws std::invalid_argument when the projected gradient exceeds
/// 1e-6 * gradient_scale(model).
StationaryClass classify_stationary_point(const CostModel& model, const Strategy& s,
                                          double tol_eig_rel = 1e-10);

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;  // projected Hessian, descending
  /// log10(max/min) over the positive eigenvalues; 0 when fewer than two.
  double log10_spread = 0.0;
};

SpectrumResult spectrum(const CostModel& model, const Strategy& s);

/// Pairwise Euclidean distances of the rate vectors scaled by dt, so the
/// entries are in volume units.
Eigen::MatrixXd distance_matrix(const std::vector<Strategy>& strategies);

struct LandscapeStats {
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // raw (Gaussian -> 3)
  double fraction_minima = 0.0;
  int negative_cost_minima = 0;
  int n_extrema = 0;
  int n_minima = 0;
  int n_saddles = 0;
  int n_maxima = 0;
  int n_indeterminate = 0;
};

struct ExtremumRecord {
  Strategy strategy;
  double cost = 0.0;
  StationaryClass classification = StationaryClass::indeterminate;
};

struct LandscapeReport {
  std::vector<ExtremumRecord> extrema;
  std::vector<SpectrumResult> spectra;   // empty unless requested
  Eigen::MatrixXd distances;
  LandscapeStats stats;
};

/// Cost moments and class counts over a set of classified extrema.
/// Requires at least two minima.
LandscapeStats summarize(const std::vector<ExtremumRecord>& extrema);

struct LandscapeOptions {
  bool with_spectra = false;
  int max_spectra = 16;  // spectra are dense eigen-decompositions; cap them
  bool with_distances = true;
  std::vector<Strategy> references;  // appended to the distance matrix (VWAP etc.)
  int workers = 0;
};

/// Classifies every extremum, assembles distances/spectra/statistics.
LandscapeReport analyze_landscape(const CostModel& model,
                                  const std::vector<SolverReport>& extrema,
                                  const LandscapeOptions& opts = {});

/// JSON landscape report and CSV spectra dump.
void write_landscape_json(const std::string& path, const LandscapeReport& report);
void write_spectra_csv(const std::string& path, const LandscapeReport& report);

}  // namespace optexec
