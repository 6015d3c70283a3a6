#include "optexec/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "optexec/linalg.hpp"
#include "optexec/parallel.hpp"
#include "optexec/rng.hpp"

namespace optexec {

void OptimizerOptions::validate() const {
  if (max_iterations < 1)
    throw std::invalid_argument("optimizer: max_iterations must be >= 1");
  if (starts < 1) throw std::invalid_argument("optimizer: starts must be >= 1");
  if (!(step_tolerance > 0.0))
    throw std::invalid_argument("optimizer: step_tolerance must be > 0");
  if (gradient_tolerance == 0.0)
    throw std::invalid_argument("optimizer: gradient_tolerance must be > 0 (or < 0 for auto)");
  if (dedup_tolerance < 0.0)
    throw std::invalid_argument("optimizer: dedup_tolerance must be >= 0");
}

std::vector<Strategy> sample_start_points(int count, const GridSpec& grid,
                                          std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_start_points: count must be >= 1");
  grid.validate();
  std::mt19937_64 gen(seed);
  const double target = grid.target_rate_sum();
  std::vector<Strategy> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k)
    out.push_back({dirichlet_uniform(grid.N, gen) * target, grid});
  return out;
}

double default_gradient_tolerance(const CostModel& model) {
  const Eigen::VectorXd vwap =
      Eigen::VectorXd::Constant(model.kernels.size(), model.grid.mean_rate());
  return 1e-9 * std::max(cost_gradient(model, vwap).lpNorm<1>(), 1e-290);
}

namespace {

double resolve_gradient_tolerance(const CostModel& model, const OptimizerOptions& opts) {
  if (opts.gradient_tolerance > 0.0) return opts.gradient_tolerance;
  return default_gradient_tolerance(model);
}

// Restores the volume constraint exactly; the Helmert-basis steps keep the
// drift at rounding level but reports promise equality to 1e-10 X.
void recenter(Eigen::VectorXd& v, const GridSpec& grid) {
  v.array() += (grid.target_rate_sum() - v.sum()) / grid.N;
}

}  // namespace

SolverReport local_minimize(const CostModel& model, const Strategy& start,
                            const OptimizerOptions& opts) {
  opts.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const GridSpec& grid = model.grid;
  const int n = grid.N;
  const double gtol = resolve_gradient_tolerance(model, opts);

  SolverReport report;
  report.solver = "sqp";
  report.seed = opts.seed;

  Eigen::VectorXd v = start.rates;
  recenter(v, grid);

  if (n == 1) {
    // The constraint pins the single rate.
    report.converged = true;
    report.cost = expected_cost(model, v);
    report.spread_component = spread_component(model, v);
    report.strategy = {std::move(v), grid};
    report.constraint_violation = report.strategy.constraint_violation();
    return report;
  }

  const Eigen::MatrixXd Z = zero_sum_basis(n);
  const int m = n - 1;

  Eigen::VectorXd grad(n);
  double cost = cost_and_gradient(model, v, grad);
  Eigen::VectorXd gy = Z.transpose() * grad;

  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(m, m);  // inverse Hessian
  bool converged = false;
  bool line_search_failed = false;
  int it = 0;

  for (; it < opts.max_iterations; ++it) {
    if (gy.norm() <= gtol) {
      converged = true;
      break;
    }

    Eigen::VectorXd dy = -(B * gy);
    double slope = gy.dot(dy);
    if (!(slope < 0.0)) {  // not a descent direction; reset curvature model
      B.setIdentity();
      dy = -gy;
      slope = gy.dot(dy);
    }

    // Backtracking Armijo line search.
    constexpr double c1 = 1e-4;
    double alpha = 1.0;
    double new_cost = 0.0;
    Eigen::VectorXd v_new, grad_new(n);
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      v_new = v + alpha * (Z * dy);
      new_cost = cost_and_gradient(model, v_new, grad_new);
      if (std::isfinite(new_cost) && new_cost <= cost + c1 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!B.isIdentity(0.0)) {  // retry from steepest descent once
        B.setIdentity();
        continue;
      }
      line_search_failed = true;
      break;
    }

    const Eigen::VectorXd s = alpha * dy;
    Eigen::VectorXd gy_new = Z.transpose() * grad_new;
    const Eigen::VectorXd yk = gy_new - gy;
    const double sy = s.dot(yk);
    if (sy > 1e-12 * s.norm() * yk.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::VectorXd By = B * yk;
      // BFGS inverse update.
      B.noalias() += (rho * rho * (yk.dot(By) + sy)) * (s * s.transpose());
      B.noalias() -= rho * (By * s.transpose() + s * By.transpose());
    }
    v = std::move(v_new);
    cost = new_cost;
    grad = std::move(grad_new);
    gy = std::move(gy_new);
  }

  recenter(v, grid);
  const Eigen::VectorXd final_grad = cost_gradient(model, v);
  report.stationarity = (Z.transpose() * final_grad).norm();
  report.converged = converged && report.stationarity <= 4.0 * gtol;
  report.iterations = it;
  report.cost = expected_cost(model, v);
  report.spread_component = spread_component(model, v);
  report.strategy = {std::move(v), grid};
  report.constraint_violation = report.strategy.constraint_violation();
  if (line_search_failed) report.message = "line search failed";
  else if (!converged) report.message = "iteration limit reached";
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

SolverReport monotone_minimize_gss(const CostModel& model, const Strategy& start,
                                   const OptimizerOptions& opts) {
  opts.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const GridSpec& grid = model.grid;
  const int n = grid.N;
  const double target = grid.target_rate_sum();

  Eigen::VectorXd v = start.rates;
  if ((v.array() < 0.0).any())
    throw std::invalid_argument("monotone_minimize_gss: start must satisfy v_i >= 0");
  if (v.sum() <= 0.0)
    throw std::invalid_argument("monotone_minimize_gss: start must carry positive volume");
  v *= target / v.sum();

  const Eigen::MatrixXd& A = model.kernels.A;
  auto f = [&](double x) { return eval(model.impact, x); };

  Eigen::VectorXd fv(n);
  for (int i = 0; i < n; ++i) fv[i] = f(v[i]);
  Eigen::VectorXd p = A * fv;              // (A f(v))_k
  Eigen::VectorXd q = A.transpose() * v;   // (A^T v)_k
  double cost = v.dot(p);                  // spread term is constant on the simplex

  const double floor = opts.step_tolerance * std::abs(grid.mean_rate());
  double step = std::abs(grid.mean_rate());
  int sweeps = 0;
  long accepts_since_refresh = 0;

  auto refresh = [&] {
    for (int i = 0; i < n; ++i) fv[i] = f(v[i]);
    p = A * fv;
    q = A.transpose() * v;
    cost = v.dot(p);
    accepts_since_refresh = 0;
  };

  while (step >= floor && sweeps < opts.max_iterations) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        // Exchange directions +-(e_i - e_j); conform to the bound v >= 0 by
        // capping the transfer at the donor's level.
        for (int dir = 0; dir < 2; ++dir) {
          const int r = dir == 0 ? i : j;  // receiver
          const int d = dir == 0 ? j : i;  // donor
          if (v[d] <= 0.0) continue;
          const double a = std::min(step, v[d]);
          const double vr = v[r] + a;
          const double vd = v[d] - a;
          const double dfr = f(vr) - fv[r];
          const double dfd = f(vd) - fv[d];
          const double dc = dfr * q[r] + dfd * q[d] + a * (p[r] - p[d]) +
                            a * (dfr * (A(r, r) - A(d, r)) + dfd * (A(r, d) - A(d, d)));
          if (dc < -1e-15 * (1.0 + std::abs(cost))) {
            v[r] = vr;
            v[d] = (a == v[d] ? 0.0 : vd);
            p += dfr * A.col(r) + dfd * A.col(d);
            q += a * (A.row(r) - A.row(d)).transpose();
            fv[r] = f(v[r]);
            fv[d] = f(v[d]);
            cost += dc;
            improved = true;
            if (++accepts_since_refresh >= 128) refresh();
          }
        }
      }
    }
    ++sweeps;
    if (!improved) step *= 0.5;
  }

  SolverReport report;
  report.solver = "direct_search";
  report.seed = opts.seed;
  report.converged = step < floor;
  report.iterations = sweeps;
  if (!report.converged) report.message = "sweep limit reached";
  report.cost = expected_cost(model, v);
  report.spread_component = spread_component(model, v);
  report.strategy = {std::move(v), grid};
  report.constraint_violation = report.strategy.constraint_violation();
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

namespace {

bool lexicographic_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] != b[k]) return a[k] < b[k];
  }
  return false;
}

bool report_less(const SolverReport& x, const SolverReport& y) {
  if (x.cost != y.cost) return x.cost < y.cost;
  return lexicographic_less(x.strategy.rates, y.strategy.rates);
}

}  // namespace

MultistartResult multistart_minimize(const CostModel& model, const OptimizerOptions& opts) {
  opts.validate();
  OptimizerOptions resolved = opts;
  resolved.gradient_tolerance = resolve_gradient_tolerance(model, opts);

  const std::vector<Strategy> starts =
      sample_start_points(opts.starts, model.grid, opts.seed);

  MultistartResult result;
  result.all.resize(starts.size());
  parallel_for(
      starts.size(),
      [&](std::size_t k) {
        result.all[k] = opts.monotone ? monotone_minimize_gss(model, starts[k], resolved)
                                      : local_minimize(model, starts[k], resolved);
      },
      opts.workers);

  std::vector<const SolverReport*> converged;
  for (const auto& r : result.all)
    if (r.converged) converged.push_back(&r);
  std::sort(converged.begin(), converged.end(),
            [](const SolverReport* a, const SolverReport* b) { return report_less(*a, *b); });

  for (const SolverReport* r : converged) {
    bool duplicate = false;
    for (const SolverReport& kept : result.extrema) {
      const double scale =
          std::max({kept.strategy.rates.norm(), r->strategy.rates.norm(), 1e-300});
      if ((kept.strategy.rates - r->strategy.rates).norm() < opts.dedup_tolerance * scale) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) result.extrema.push_back(*r);
  }

  if (!result.extrema.empty()) {
    result.best = result.extrema.front();
  } else if (!result.all.empty()) {
    // Nothing converged; surface the best iterate anyway, flagged.
    const auto it = std::min_element(result.all.begin(), result.all.end(), report_less);
    result.best = *it;
    result.best.converged = false;
    result.best.message = "no start converged";
  }
  return result;
}

void write_starts_csv(const std::string& path, const std::vector<SolverReport>& reports) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_starts_csv: cannot open " + path);
  out << "start_id,converged,cost,stationarity,iterations\n";
  for (std::size_t k = 0; k < reports.size(); ++k)
    out << k << ',' << (reports[k].converged ? 1 : 0) << ','
        << format_double(reports[k].cost) << ',' << format_double(reports[k].stationarity)
        << ',' << reports[k].iterations << '\n';
}

}  // namespace optexec
