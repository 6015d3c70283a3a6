#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "optexec/cost.hpp"
#include "optexec/report.hpp"

namespace optexec {

enum class SolverKind { dham, dang, perturbative, multistart, monotone };
enum class RegularizationKind { none, spread, concave_convex };

std::string to_string(SolverKind k);
std::string to_string(RegularizationKind k);

/// Full problem parameterization as read from a config file. Every field has
/// a default, and the `defaults` subcommand prints all of them, so no
/// parameter is hidden.
struct ProblemSpec {
  // [problem]
  double gamma = 0.5;
  double delta = 0.5;
  GridSpec grid{100, 1.0, 0.1};
  bool allow_manipulation_region = false;

  // [regularization]
  RegularizationKind regularization = RegularizationKind::none;
  double spread_ratio = 0.0;     // r
  double cc_d = 0.0;             // convex weight
  double cc_market_volume = 1.0; // X_M
  double cc_scale = 1.0;         // c

  // [solver]
  SolverKind solver = SolverKind::multistart;
  int dham_order = 7;
  double hbar_min = -120.0;
  double hbar_max = 0.0;  // exclusive; grid stays strictly negative
  int hbar_count = 121;
  std::string dham_init = "gss";  // gss | vwap
  double lambda_tolerance = 1e-3;
  double dang_epsilon = 1e-6;
  int max_iterations = 0;  // 0 -> solver default (500 for dang, 2000 for the optimizers)
  int mean_field_window = 20;
  double rel_std_threshold = 1e-9;
  double perturbative_eps = std::numeric_limits<double>::quiet_NaN();  // -> 1 - delta
  int starts = 100;
  std::uint64_t seed = 12345;
  double gradient_tolerance = -1.0;
  double step_tolerance = 1e-8;
  int workers = 0;

  // [output]
  std::string out_report;
  std::string out_profile;
  std::string out_curve;
  std::string out_starts_csv;
  std::string out_landscape;
  std::string out_spectra;

  /// Exponent actually driving the impact nonlinearity (1 - eps for the
  /// perturbative solver).
  double effective_delta() const;

  /// Throws std::invalid_argument when (gamma, delta) leaves the
  /// no-dynamic-arbitrage region (gamma + delta >= 1, gamma >= 0.415)
  /// without the override flag, or when any parameter is malformed.
  void validate() const;

  ImpactModel impact_model() const;
  double spread_value() const;
  CostModel make_model() const;
};

/// Parses the flat key-value config format ('#' comments, [section] headers,
/// key = value lines). Unknown keys are hard errors naming the key.
ProblemSpec parse_config_text(const std::string& text);
ProblemSpec parse_config_file(const std::string& path);

/// The annotated config with every default filled in.
std::string default_config_text();

/// JSON report round trip: the stored spec plus strategy re-evaluate to the
/// stored cost.
void save_report_json(const std::string& path, const ProblemSpec& spec,
                      const SolverReport& report);
struct LoadedReport {
  ProblemSpec spec;
  SolverReport report;
};
LoadedReport load_report_json(const std::string& path);

}  // namespace optexec
