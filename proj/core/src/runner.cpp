#include "optexec/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "optexec/dang.hpp"
#include "optexec/dham.hpp"
#include "optexec/landscape.hpp"
#include "optexec/perturbative.hpp"
#include "optexec/tables.hpp"

namespace optexec {

namespace {

std::vector<double> hbar_grid_from_spec(const ProblemSpec& spec) {
  std::vector<double> grid(spec.hbar_count);
  const double step = (spec.hbar_max - spec.hbar_min) / spec.hbar_count;
  for (int k = 0; k < spec.hbar_count; ++k) grid[k] = spec.hbar_min + k * step;
  return grid;
}

OptimizerOptions optimizer_options_from_spec(const ProblemSpec& spec) {
  OptimizerOptions opts;
  if (spec.max_iterations > 0) opts.max_iterations = spec.max_iterations;
  opts.gradient_tolerance = spec.gradient_tolerance;
  opts.step_tolerance = spec.step_tolerance;
  opts.seed = spec.seed;
  opts.starts = spec.starts;
  opts.monotone = spec.solver == SolverKind::monotone;
  opts.workers = spec.workers;
  return opts;
}

DangConfig dang_config_from_spec(const ProblemSpec& spec) {
  DangConfig cfg;
  cfg.epsilon = spec.dang_epsilon;
  if (spec.max_iterations > 0) cfg.max_iterations = spec.max_iterations;
  cfg.mean_field_window = spec.mean_field_window;
  cfg.rel_std_threshold = spec.rel_std_threshold;
  cfg.lambda_tolerance = spec.lambda_tolerance;
  return cfg;
}

}  // namespace

RunOutcome run_problem(const ProblemSpec& spec) {
  spec.validate();
  RunOutcome outcome;

  const bool start_based =
      spec.solver == SolverKind::multistart || spec.solver == SolverKind::monotone;
  if (spec.regularization == RegularizationKind::spread && !start_based)
    throw std::invalid_argument(
        "run: spread regularization is only supported by the multistart and "
        "monotone solvers");
  if (spec.regularization == RegularizationKind::concave_convex &&
      (spec.solver == SolverKind::dang || spec.solver == SolverKind::perturbative))
    throw std::invalid_argument(
        "run: the dang and perturbative solvers support power-law impact only");

  switch (spec.solver) {
    case SolverKind::dham: {
      const CostModel model = spec.make_model();
      DhamConfig cfg;
      cfg.order = spec.dham_order;
      cfg.hbar_grid = hbar_grid_from_spec(spec);
      cfg.lambda_tolerance = spec.lambda_tolerance;
      cfg.init = spec.dham_init == "vwap" ? vwap_strategy(spec.grid)
                                          : gss_strategy(spec.gamma, spec.grid);
      outcome.report = dham_solve(cfg, model);
      break;
    }
    case SolverKind::dang: {
      const CostModel model = spec.make_model();
      outcome.report = dang_solve(dang_config_from_spec(spec), model);
      break;
    }
    case SolverKind::perturbative: {
      const double eps =
          std::isnan(spec.perturbative_eps) ? 1.0 - spec.delta : spec.perturbative_eps;
      outcome.report = perturbative_solve(spec.gamma, eps, spec.grid);
      break;
    }
    case SolverKind::multistart:
    case SolverKind::monotone: {
      const CostModel model = spec.make_model();
      MultistartResult result = multistart_minimize(model, optimizer_options_from_spec(spec));
      outcome.report = result.best;
      outcome.multistart = std::move(result);
      break;
    }
  }
  outcome.report.seed = spec.seed;
  return outcome;
}

int run_to_files(const ProblemSpec& spec) {
  const RunOutcome outcome = run_problem(spec);
  const SolverReport& report = outcome.report;

  if (!spec.out_report.empty()) save_report_json(spec.out_report, spec, report);
  if (!spec.out_profile.empty()) write_profile_csv(spec.out_profile, report.strategy);
  if (!spec.out_curve.empty() && !report.residual_curve.empty())
    write_curve_csv(spec.out_curve, report.residual_curve);
  if (outcome.multistart) {
    if (!spec.out_starts_csv.empty())
      write_starts_csv(spec.out_starts_csv, outcome.multistart->all);
    if (!spec.out_landscape.empty() || !spec.out_spectra.empty()) {
      const CostModel model = spec.make_model();
      LandscapeOptions lopts;
      lopts.with_spectra = !spec.out_spectra.empty();
      lopts.references = {vwap_strategy(spec.grid)};
      lopts.workers = spec.workers;
      const LandscapeReport land =
          analyze_landscape(model, outcome.multistart->extrema, lopts);
      if (!spec.out_landscape.empty()) write_landscape_json(spec.out_landscape, land);
      if (!spec.out_spectra.empty()) write_spectra_csv(spec.out_spectra, land);
    }
  }
  return report.converged ? 0 : 2;
}

namespace {

struct CsvTable {
  std::ofstream out;
  explicit CsvTable(const std::string& path, const std::string& header) : out(path) {
    if (!out) throw std::runtime_error("reproduce: cannot open " + path);
    out << header << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k)
      out << cells[k] << (k + 1 < cells.size() ? "," : "");
    out << '\n';
  }
};

std::string rel_dev(double computed, double reference) {
  if (reference == 0.0) return "nan";
  return format_double((computed - reference) / std::abs(reference));
}

ProblemSpec base_spec(double gamma, double delta) {
  ProblemSpec s;
  s.gamma = gamma;
  s.delta = delta;
  s.grid = GridSpec{100, 1.0, 0.1};
  return s;
}

SolverReport run_dham_cell(double gamma, double delta, int workers) {
  ProblemSpec s = base_spec(gamma, delta);
  const CostModel model = s.make_model();
  DhamConfig cfg;
  cfg.order = 7;
  cfg.init = gss_strategy(gamma, s.grid);
  (void)workers;
  return dham_solve(cfg, model);
}

MultistartResult run_sqp_cell(const CostModel& model, int starts, std::uint64_t seed,
                              int workers, bool monotone = false) {
  OptimizerOptions opts;
  opts.starts = starts;
  opts.seed = seed;
  opts.workers = workers;
  opts.monotone = monotone;
  return multistart_minimize(model, opts);
}

int reproduce_costs_main(const ReproduceOptions& opts) {
  CsvTable csv(opts.out_dir + "/costs_main.csv",
               "gamma,delta,strategy,reference,computed,relative_deviation");
  for (const double gamma : {0.45, 0.5}) {
    for (const auto& row : tables::reference_costs(gamma)) {
      ProblemSpec s = base_spec(gamma, row.delta);
      const CostModel model = s.make_model();
      const double vwap = vwap_cost_closed_form(model.impact, gamma, s.grid);
      const double gss = expected_cost(model, gss_strategy(gamma, s.grid).rates);
      const SolverReport dham = run_dham_cell(gamma, row.delta, opts.workers);
      csv.row({format_double(gamma), format_double(row.delta), "vwap",
               format_double(row.vwap), format_double(vwap), rel_dev(vwap, row.vwap)});
      csv.row({format_double(gamma), format_double(row.delta), "gss",
               format_double(row.gss), format_double(gss), rel_dev(gss, row.gss)});
      csv.row({format_double(gamma), format_double(row.delta), "dham",
               format_double(row.dham), format_double(dham.cost),
               rel_dev(dham.cost, row.dham)});
    }
  }
  return 0;
}

int reproduce_costs_optimizers(const ReproduceOptions& opts) {
  const int sqp_starts = opts.starts_override > 0 ? opts.starts_override
                         : (opts.quick ? 100 : 1000);
  const int direct_starts = opts.starts_override > 0 ? opts.starts_override
                            : (opts.quick ? 20 : 200);
  CsvTable csv(opts.out_dir + "/costs_optimizers.csv",
               "gamma,delta,strategy,reference,computed,relative_deviation");
  for (const double gamma : {0.45, 0.5}) {
    for (const auto& row : tables::reference_optimizer_costs(gamma)) {
      ProblemSpec s = base_spec(gamma, row.delta);
      const CostModel model = s.make_model();
      const SolverReport dham = run_dham_cell(gamma, row.delta, opts.workers);
      const MultistartResult sqp =
          run_sqp_cell(model, sqp_starts, opts.seed, opts.workers);
      const MultistartResult direct =
          run_sqp_cell(model, direct_starts, opts.seed, opts.workers, true);
      csv.row({format_double(gamma), format_double(row.delta), "dham",
               format_double(row.dham), format_double(dham.cost),
               rel_dev(dham.cost, row.dham)});
      csv.row({format_double(gamma), format_double(row.delta), "sqp",
               format_double(row.sqp), format_double(sqp.best.cost),
               rel_dev(sqp.best.cost, row.sqp)});
      csv.row({format_double(gamma), format_double(row.delta), "direct",
               format_double(row.direct), format_double(direct.best.cost),
               rel_dev(direct.best.cost, row.direct)});
    }
  }
  return 0;
}

int reproduce_concave_convex(const ReproduceOptions& opts) {
  const int starts = opts.starts_override > 0 ? opts.starts_override
                     : (opts.quick ? 200 : 1000);
  CsvTable csv(opts.out_dir + "/concave_convex.csv",
               "d,quantity,reference,computed,relative_deviation");
  for (const auto& row : tables::reference_concave_convex()) {
    ProblemSpec s = base_spec(0.45, 0.55);
    s.regularization = RegularizationKind::concave_convex;
    s.cc_d = row.d;
    s.cc_market_volume = 1.0;
    s.cc_scale = 1.0;
    const CostModel model = s.make_model();
    const ConcaveConvex& cc = std::get<ConcaveConvex>(model.impact);

    const double vstar = inflection_rate(cc);
    const double vwap = vwap_cost_closed_form(model.impact, s.gamma, s.grid);
    const MultistartResult sqp = run_sqp_cell(model, starts, opts.seed, opts.workers);

    double mean_pos = 0.0, std_pos = 0.0;
    int n_pos = 0;
    for (Eigen::Index k = 0; k < sqp.best.strategy.rates.size(); ++k)
      if (sqp.best.strategy.rates[k] > 0.0) {
        mean_pos += sqp.best.strategy.rates[k];
        ++n_pos;
      }
    if (n_pos > 0) mean_pos /= n_pos;
    for (Eigen::Index k = 0; k < sqp.best.strategy.rates.size(); ++k)
      if (sqp.best.strategy.rates[k] > 0.0) {
        const double d = sqp.best.strategy.rates[k] - mean_pos;
        std_pos += d * d;
      }
    if (n_pos > 0) std_pos = std::sqrt(std_pos / n_pos);

    const std::string ds = format_double(row.d);
    csv.row({ds, "vstar", format_double(row.vstar), format_double(vstar),
             rel_dev(vstar, row.vstar)});
    csv.row({ds, "cost_vwap", format_double(row.cost_vwap), format_double(vwap),
             rel_dev(vwap, row.cost_vwap)});
    csv.row({ds, "cost_sqp", format_double(row.cost_sqp), format_double(sqp.best.cost),
             rel_dev(sqp.best.cost, row.cost_sqp)});
    csv.row({ds, "mean_positive_rate", format_double(row.mean_positive_rate),
             format_double(mean_pos), rel_dev(mean_pos, row.mean_positive_rate)});
    csv.row({ds, "std_positive_rate", format_double(row.std_positive_rate),
             format_double(std_pos), rel_dev(std_pos, row.std_positive_rate)});
  }
  return 0;
}

int reproduce_distance_matrix(const ReproduceOptions& opts) {
  const int starts = opts.starts_override > 0 ? opts.starts_override
                     : (opts.quick ? 200 : 1000);
  ProblemSpec s = base_spec(0.5, 0.5);
  const CostModel model = s.make_model();
  const MultistartResult sqp = run_sqp_cell(model, starts, opts.seed, opts.workers);

  std::vector<Strategy> strategies;
  for (std::size_t k = 0; k < sqp.extrema.size() && strategies.size() < 4; ++k)
    strategies.push_back(sqp.extrema[k].strategy);
  strategies.push_back(vwap_strategy(s.grid));
  const Eigen::MatrixXd D = distance_matrix(strategies);
  const auto& ref = tables::reference_distance_matrix();

  CsvTable csv(opts.out_dir + "/distance_matrix.csv", "row,col,computed,reference");
  for (Eigen::Index r = 0; r < D.rows(); ++r)
    for (Eigen::Index c = 0; c < D.cols(); ++c) {
      const bool has_ref = r < 5 && c < 5;
      csv.row({std::to_string(r), std::to_string(c), format_double(D(r, c)),
               has_ref ? format_double(ref[r][c]) : "nan"});
    }
  return 0;
}

int reproduce_dang_region(const ReproduceOptions& opts) {
  std::vector<int> n_list = opts.quick ? std::vector<int>{4, 100}
                                       : std::vector<int>{4, 10, 25, 50, 100, 150};
  std::vector<double> d_list;
  const double step = opts.quick ? 0.1 : 0.05;
  for (double d = 0.5; d <= 1.0 + 1e-9; d += step) d_list.push_back(d);
  DangConfig cfg;
  const std::vector<ScanCell> cells =
      convergence_scan(n_list, d_list, 0.5, 1.0, 0.1, cfg, 0, opts.seed, opts.workers);
  write_scan_csv(opts.out_dir + "/dang_region.csv", cells);
  return 0;
}

int reproduce_cost_surface(const ReproduceOptions& opts) {
  const int starts = opts.starts_override > 0 ? opts.starts_override
                     : (opts.quick ? 100 : 1000);
  std::vector<double> gammas =
      opts.gamma_list.empty() ? std::vector<double>{0.45, 0.5} : opts.gamma_list;
  std::vector<double> deltas = opts.delta_list;
  if (deltas.empty())
    for (double d = 0.55; d <= 1.0 + 1e-9; d += 0.05) deltas.push_back(d);

  CsvTable csv(opts.out_dir + "/cost_surface.csv",
               "gamma,delta,best_cost,n_extrema,converged_starts");
  for (const double gamma : gammas) {
    for (const double delta : deltas) {
      if (gamma + delta < 1.0 - 1e-9) continue;  // outside the admissible region
      ProblemSpec s = base_spec(gamma, delta);
      const CostModel model = s.make_model();
      const MultistartResult sqp = run_sqp_cell(model, starts, opts.seed, opts.workers);
      int converged = 0;
      for (const auto& r : sqp.all) converged += r.converged ? 1 : 0;
      csv.row({format_double(gamma), format_double(delta), format_double(sqp.best.cost),
               std::to_string(sqp.extrema.size()), std::to_string(converged)});
    }
  }
  return 0;
}

}  // namespace

std::vector<std::string> reproduce_table_ids() {
  return {"costs_main", "costs_optimizers", "concave_convex",
          "distance_matrix", "dang_region", "cost_surface"};
}

int reproduce(const std::string& table_id, const ReproduceOptions& opts) {
  std::filesystem::create_directories(opts.out_dir);
  if (table_id == "costs_main") return reproduce_costs_main(opts);
  if (table_id == "costs_optimizers") return reproduce_costs_optimizers(opts);
  if (table_id == "concave_convex") return reproduce_concave_convex(opts);
  if (table_id == "distance_matrix") return reproduce_distance_matrix(opts);
  if (table_id == "dang_region") return reproduce_dang_region(opts);
  if (table_id == "cost_surface") return reproduce_cost_surface(opts);
  throw std::invalid_argument("reproduce: unknown table id '" + table_id + "'");
}

}  // namespace optexec
