#include "optexec/dang.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "optexec/errors.hpp"
#include "optexec/parallel.hpp"
#include "optexec/rng.hpp"

namespace optexec {

void DangConfig::validate() const {
  if (epsilon < 0.0) throw std::invalid_argument("dang: epsilon must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("dang: max_iterations must be >= 1");
  if (mean_field_window < 2) throw std::invalid_argument("dang: window must be >= 2");
  if (!(rel_std_threshold > 0.0))
    throw std::invalid_argument("dang: rel_std_threshold must be > 0");
  if (!(lambda_tolerance > 0.0))
    throw std::invalid_argument("dang: lambda_tolerance must be > 0");
}

Strategy dang_initial_guess(double lambda, const ImpactModel& impact,
                            const KernelMatrices& kernels, const GridSpec& grid) {
  const double S = kernels.G.row(0).sum();
  auto g = [&](double v) { return v * deriv(impact, v) * S - lambda; };
  if (!(lambda > 0.0))
    throw SearchError("dang_initial_guess: needs lambda > 0 for a buy program");

  // v f'(v) is increasing from 0 for the impact families in scope; expand an
  // upper bound until the target is bracketed.
  double lo = 0.0;
  double hi = std::max(lambda / S, 1e-12);
  int guard = 0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200 || !std::isfinite(hi))
      throw SearchError("dang_initial_guess: no positive root found");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  const double v = 0.5 * (lo + hi);
  return {Eigen::VectorXd::Constant(grid.N, v), grid};
}

Eigen::VectorXd dang_map(const Eigen::VectorXd& v, double lambda,
                         const ImpactModel& impact, const Eigen::MatrixXd& G) {
  const int n = static_cast<int>(v.size());
  Eigen::VectorXd fv(n), fp(n);
  for (int k = 0; k < n; ++k) {
    fv[k] = eval(impact, v[k]);
    fp[k] = deriv(impact, v[k]);
  }
  if (!fv.allFinite() || !fp.allFinite())
    throw SearchError("dang_map: impact evaluation overflowed");

  // K_ij = G_ij F'_ij with the one-argument derivative of Eq-style F:
  // column derivative below the diagonal, row derivative above it.
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) {
    double ci = lambda;
    for (int j = 0; j <= i; ++j) {
      K(i, j) = G(i, j) * fp[j];
      ci -= G(i, j) * (fv[j] - v[j] * fp[j]);
    }
    for (int j = i + 1; j < n; ++j) K(i, j) = G(i, j) * fp[i];
    c[i] = ci;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd out = lu.solve(c);
  if (!out.allFinite()) throw SearchError("dang_map: singular linearized system");
  return out;
}

namespace {

struct InnerResult {
  Eigen::VectorXd v;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;
};

InnerResult iterate_to_fixed_point(const DangConfig& config, const ImpactModel& impact,
                                   const Eigen::MatrixXd& G, double lambda,
                                   const Eigen::VectorXd& start, double cap) {
  InnerResult r;
  r.v = start;
  r.trace.reserve(config.max_iterations);
  const int w = config.mean_field_window;
  for (int m = 1; m <= config.max_iterations; ++m) {
    try {
      r.v = dang_map(r.v, lambda, impact, G);
    } catch (const std::exception&) {
      r.iterations = m;
      return r;
    }
    if (!r.v.allFinite() || r.v.lpNorm<Eigen::Infinity>() > cap) {
      r.iterations = m;
      return r;
    }
    r.trace.push_back(r.v.mean());
    r.iterations = m;
    if (m >= w) {
      double mean = 0.0;
      for (int k = 0; k < w; ++k) mean += r.trace[m - 1 - k];
      mean /= w;
      double var = 0.0;
      for (int k = 0; k < w; ++k) {
        const double d = r.trace[m - 1 - k] - mean;
        var += d * d;
      }
      const double rel_std = std::sqrt(var / w) / std::max(std::abs(mean), 1e-300);
      if (rel_std < config.rel_std_threshold) {
        r.converged = true;
        return r;
      }
    }
  }
  return r;
}

}  // namespace

SolverReport dang_solve(const DangConfig& config, const CostModel& model,
                        const std::optional<Strategy>& init) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const GridSpec& grid = model.grid;
  const ImpactModel map_impact =
      PerturbedPowerLaw{exponent_of(model.impact), config.epsilon};
  const Eigen::MatrixXd& G = model.kernels.G;
  const double cap = 1e12 * std::max(1.0, std::abs(grid.mean_rate()));
  const double target = grid.target_rate_sum();

  SolverReport report;
  report.solver = "dang";
  report.lambda = std::nullopt;

  auto fail = [&](const InnerResult& inner, const std::string& msg) {
    report.converged = false;
    report.message = msg;
    report.iterations = inner.iterations;
    report.mean_field_trace = inner.trace;
    Eigen::VectorXd v = inner.v.allFinite() ? inner.v : Eigen::VectorXd::Zero(grid.N);
    report.strategy = Strategy{v, grid};
    report.constraint_violation = report.strategy.constraint_violation();
    try {
      report.cost = expected_cost(model, report.strategy.rates);
      report.spread_component = spread_component(model, report.strategy.rates);
    } catch (const std::exception&) {
      report.cost = std::numeric_limits<double>::quiet_NaN();
    }
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
  };

  // Starting multiplier: the one whose constant initial guess is the VWAP rate.
  const double vr = std::abs(grid.mean_rate()) > 0.0 ? grid.mean_rate() : 1.0;
  double lam = vr * deriv(map_impact, vr) * G.row(0).sum();

  Eigen::VectorXd start =
      init ? init->rates : dang_initial_guess(lam, map_impact, model.kernels, grid).rates;

  InnerResult inner = iterate_to_fixed_point(config, map_impact, G, lam, start, cap);
  if (!inner.converged) return fail(inner, "dang: fixed-point iteration did not converge");

  // Outer secant on lambda; each evaluation re-converges the inner loop,
  // warm-started from the previous fixed point.
  const double tol_paper = config.lambda_tolerance * std::abs(grid.X) / grid.dt();
  const double tol = std::min(tol_paper, 1e-10 * std::max(std::abs(target), 1.0));

  double la = lam, ga = inner.v.sum() - target;
  InnerResult best = inner;
  double best_lambda = lam, best_defect = std::abs(ga);

  if (std::abs(ga) > tol) {
    double lb = lam * (1.0 + 1e-2);
    InnerResult ib = iterate_to_fixed_point(config, map_impact, G, lb, inner.v, cap);
    if (!ib.converged) return fail(ib, "dang: inner loop diverged while tuning lambda");
    double gb = ib.v.sum() - target;
    if (std::abs(gb) < best_defect) {
      best = ib;
      best_lambda = lb;
      best_defect = std::abs(gb);
    }
    for (int it = 0; it < 60 && std::abs(gb) > tol; ++it) {
      const double denom = gb - ga;
      if (denom == 0.0) break;
      double lc = lb - gb * (lb - la) / denom;
      if (!std::isfinite(lc)) break;
      InnerResult ic;
      // Damp the step towards the last good lambda if the inner loop fails.
      bool ok = false;
      for (int damp = 0; damp < 8; ++damp) {
        ic = iterate_to_fixed_point(config, map_impact, G, lc, ib.v, cap);
        if (ic.converged) {
          ok = true;
          break;
        }
        lc = 0.5 * (lc + lb);
      }
      if (!ok) return fail(ic, "dang: inner loop diverged while tuning lambda");
      la = lb;
      ga = gb;
      lb = lc;
      ib = ic;
      gb = ib.v.sum() - target;
      if (std::abs(gb) < best_defect) {
        best = ib;
        best_lambda = lb;
        best_defect = std::abs(gb);
      }
    }
  }

  if (best_defect * grid.dt() > config.lambda_tolerance * std::abs(grid.X))
    return fail(best, "dang: volume constraint not met within tolerance");

  Strategy out{best.v, grid};
  report.converged = true;
  report.lambda = best_lambda;
  report.iterations = best.iterations;
  report.mean_field_trace = best.trace;
  report.squared_residual =
      urysohn_residual(map_impact, model.kernels, out.rates, best_lambda).squared;
  report.cost = expected_cost(model, out.rates);
  report.spread_component = spread_component(model, out.rates);
  report.constraint_violation = out.constraint_violation();
  report.strategy = std::move(out);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

std::vector<ScanCell> convergence_scan(const std::vector<int>& N_list,
                                       const std::vector<double>& delta_list,
                                       double gamma, double T, double X,
                                       const DangConfig& config, int random_starts,
                                       std::uint64_t seed, int workers) {
  if (N_list.empty() || delta_list.empty())
    throw std::invalid_argument("convergence_scan: empty parameter lists");
  const std::size_t n_cells = N_list.size() * delta_list.size();
  std::vector<ScanCell> cells(n_cells);

  parallel_for(
      n_cells,
      [&](std::size_t idx) {
        const int N = N_list[idx / delta_list.size()];
        const double delta = delta_list[idx % delta_list.size()];
        GridSpec grid{N, T, X};
        const KernelMatrices kernels = make_kernel_matrices(gamma, grid);
        const CostModel model = make_cost_model(PowerLaw{delta}, kernels, grid);

        // The constant guess can fall outside the (small) basin even where a
        // fixed point exists; the extra simplex-random guesses probe for it.
        SolverReport best = dang_solve(config, model);
        for (int s = 0; s < random_starts && !best.converged; ++s) {
          std::mt19937_64 gen(mix_seed(seed, idx * 1000003ull + s));
          Eigen::VectorXd w = dirichlet_uniform(N, gen) * grid.target_rate_sum();
          SolverReport r = dang_solve(config, model, Strategy{w, grid});
          if (r.converged) best = std::move(r);
        }

        ScanCell cell;
        cell.N = N;
        cell.delta = delta;
        cell.converged = best.converged;
        cell.iterations = best.iterations;
        cell.squared_residual = best.squared_residual.value_or(
            std::numeric_limits<double>::quiet_NaN());
        cells[idx] = cell;
      },
      workers);
  return cells;
}

void write_scan_csv(const std::string& path, const std::vector<ScanCell>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_scan_csv: cannot open " + path);
  out << "N,delta,converged,iterations,squared_residual\n";
  for (const ScanCell& c : cells)
    out << c.N << ',' << format_double(c.delta) << ',' << (c.converged ? 1 : 0) << ','
        << c.iterations << ',' << format_double(c.squared_residual) << '\n';
}

}  // namespace optexec
