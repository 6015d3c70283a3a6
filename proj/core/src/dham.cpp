#include "optexec/dham.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "optexec/errors.hpp"
#include "optexec/parallel.hpp"

namespace optexec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Memoized homotopy-derivative tables for all grid points.
//
// Per point i, coeff(i, k) is the k-th series coefficient (the term v^k_i)
// and tab[i](d, k) = D_k[f^(d) o phi_i], the k-th homotopy derivative of the
// d-th impact derivative composed with the point's series. Columns are
// appended as new terms arrive; the one-variable composition rule reads
//   D_m[f^(d) o phi] = sum_{k<m} (1 - k/m) coeff_{m-k} D_k[f^(d+1) o phi],
// anchored at D_0[f^(d) o phi] = f^(d)(v^0).
class HomotopyTables {
 public:
  HomotopyTables(const ImpactModel& impact, const Eigen::VectorXd& v0, int order)
      : order_(order), filled_(0), n_(static_cast<int>(v0.size())) {
    coeff_.resize(n_, order + 1);
    coeff_.col(0) = v0;
    tab_.assign(n_, Eigen::MatrixXd::Zero(order + 2, order + 1));
    for (int i = 0; i < n_; ++i) {
      const std::vector<double> d = derivatives_at(impact, v0[i], order + 1);
      for (int k = 0; k <= order + 1; ++k) tab_[i](k, 0) = d[k];
    }
  }

  int filled_order() const { return filled_; }

  void extend(const Eigen::VectorXd& term) {
    const int m = ++filled_;
    if (m > order_) throw std::logic_error("HomotopyTables: extended past order");
    coeff_.col(m) = term;
    for (int i = 0; i < n_; ++i) {
      for (int d = 0; d + m <= order_ + 1; ++d) {
        double s = 0.0;
        for (int k = 0; k < m; ++k)
          s += (1.0 - static_cast<double>(k) / m) * coeff_(i, m - k) * tab_[i](d + 1, k);
        tab_[i](d, m) = s;
      }
    }
  }

  // F^m: the m-th homotopy derivative of F(phi(s_j), phi(t_i)) on the grid.
  // Row index i plays the t role, column index j the s role.
  Eigen::MatrixXd derivative_F(int m) const {
    if (m < 1 || m > filled_)
      throw std::invalid_argument("derivative_F: order not yet available");
    Eigen::MatrixXd F(n_, n_);
    // j <= i: D_m[f o phi_j], independent of i.
    Eigen::VectorXd lower(n_);
    for (int j = 0; j < n_; ++j) lower[j] = tab_[j](0, m);

    // j > i: two-variable rule for (u, w) -> u f'(w) with u = phi_j, w = phi_i:
    //   D_m = sum_{k<m} (1-k/m) [ u_{m-k} D_k[f' o phi_i]
    //                           + w_{m-k} D_k[phi_j . f'' o phi_i] ],
    // where the second bracket is the Cauchy product of the j coefficients
    // with the f'' table of i. Factoring the product gives, per row i,
    //   term2(i, j) = sum_l coeff(j, l) U_i[l].
    Eigen::VectorXd w1(m), U(m);
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < m; ++k)
        w1[k] = (1.0 - static_cast<double>(k) / m) * tab_[i](1, k);
      for (int l = 0; l < m; ++l) {
        double s = 0.0;
        for (int k = l; k < m; ++k)
          s += (1.0 - static_cast<double>(k) / m) * coeff_(i, m - k) * tab_[i](2, k - l);
        U[l] = s;
      }
      for (int j = 0; j <= i; ++j) F(i, j) = lower[j];
      for (int j = i + 1; j < n_; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += coeff_(j, m - k) * w1[k];
        for (int l = 0; l < m; ++l) s += coeff_(j, l) * U[l];
        F(i, j) = s;
      }
    }
    return F;
  }

 private:
  int order_;
  int filled_;
  int n_;
  Eigen::MatrixXd coeff_;
  std::vector<Eigen::MatrixXd> tab_;
};

void check_config(const DhamConfig& config, const KernelMatrices& kernels) {
  if (config.order < 1) throw std::invalid_argument("dham: order must be >= 1");
  if (config.init.rates.size() != kernels.size())
    throw std::invalid_argument("dham: init length does not match the kernel grid");
  const auto& v0 = config.init.rates;
  const bool buy = (v0.array() > 0.0).all();
  const bool sell = (v0.array() < 0.0).all();
  if (!buy && !sell)
    throw std::invalid_argument("dham: initial guess must be strictly one-signed");
}

double divergence_cap(const GridSpec& grid) {
  return 1e12 * std::max(1.0, std::abs(grid.mean_rate()));
}

}  // namespace

std::vector<double> default_hbar_grid() {
  std::vector<double> g(121);
  for (int k = 0; k <= 120; ++k) g[k] = -120.0 + k * (120.0 / 121.0);
  return g;
}

Eigen::VectorXd DhamState::solution() const {
  Eigen::VectorXd v = terms.front();
  for (std::size_t m = 1; m < terms.size(); ++m) v += terms[m];
  return v;
}

Eigen::MatrixXd homotopy_derivative_F(const std::vector<Eigen::VectorXd>& terms,
                                      const ImpactModel& impact, int m) {
  if (m < 1) throw std::invalid_argument("homotopy_derivative_F: m must be >= 1");
  if (static_cast<int>(terms.size()) < m + 1)
    throw std::invalid_argument("homotopy_derivative_F: needs terms v^0..v^m");
  HomotopyTables tables(impact, terms[0], m);
  for (int k = 1; k <= m; ++k) tables.extend(terms[k]);
  return tables.derivative_F(m);
}

DhamState dham_iterate(const DhamConfig& config, const CostModel& model,
                       double hbar, double lambda) {
  check_config(config, model.kernels);
  const auto& G = model.kernels.G;
  const double cap = divergence_cap(model.grid);

  DhamState state;
  state.lambda = lambda;
  state.hbar = hbar;
  state.terms.reserve(config.order + 1);
  state.terms.push_back(config.init.rates);

  // First deformation: v^1 = hbar (-lambda + sum_j G_ij F_ij(v^0)).
  const Eigen::MatrixXd F0 = build_F_matrix(model.impact, config.init.rates);
  Eigen::VectorXd r0 = (G.cwiseProduct(F0)).rowwise().sum().array() - lambda;
  state.terms.push_back(hbar * r0);

  if (config.order == 1) return state;

  HomotopyTables tables(model.impact, config.init.rates, config.order);
  tables.extend(state.terms[1]);
  for (int m = 2; m <= config.order; ++m) {
    const Eigen::MatrixXd Fm = tables.derivative_F(m - 1);
    Eigen::VectorXd vm =
        state.terms[m - 1] + hbar * (G.cwiseProduct(Fm)).rowwise().sum();
    if (!vm.allFinite() || vm.lpNorm<Eigen::Infinity>() > cap) {
      state.diverged = true;
      return state;
    }
    state.terms.push_back(vm);
    if (m < config.order) tables.extend(vm);
  }
  return state;
}

namespace {

// Volume defect of the order-n solution at this lambda; infinity if the
// series diverged.
double volume_defect(const DhamConfig& config, const CostModel& model,
                     double hbar, double lambda, DhamState* out) {
  DhamState s = dham_iterate(config, model, hbar, lambda);
  if (s.diverged) {
    if (out) *out = std::move(s);
    return kInf;
  }
  const double defect = s.solution().sum() - model.grid.target_rate_sum();
  if (out) *out = std::move(s);
  return defect;
}

}  // namespace

double calibrate_lambda(const DhamConfig& config, const CostModel& model,
                        double hbar) {
  const double target = model.grid.target_rate_sum();
  const double dt = model.grid.dt();
  const double tol_paper = config.lambda_tolerance * std::abs(model.grid.X) / dt;
  // Iterate well past the contractual tolerance so the calibrated root is a
  // property of the equation, not of the iteration path.
  const double tol = std::min(tol_paper, 1e-10 * std::max(std::abs(target), 1.0));

  // Natural starting point: the constant that best fits the initial guess's
  // stationarity defect, i.e. the mean of sum_j G_ij F_ij(v^0).
  const Eigen::MatrixXd F0 = build_F_matrix(model.impact, config.init.rates);
  const double lam0 =
      (model.kernels.G.cwiseProduct(F0)).rowwise().sum().mean();

  double a = lam0;
  double ga = volume_defect(config, model, hbar, a, nullptr);
  if (!std::isfinite(ga))
    throw CalibrationError("dham: series diverged at initial lambda", a);
  double best_l = a, best_g = std::abs(ga);
  if (std::abs(ga) <= tol) return a;

  double b = lam0 != 0.0 ? lam0 * (1.0 + 1e-2) : 1e-8;
  double gb = volume_defect(config, model, hbar, b, nullptr);
  for (int it = 0; it < 60 && std::isfinite(gb); ++it) {
    if (std::abs(gb) < best_g) {
      best_g = std::abs(gb);
      best_l = b;
    }
    if (std::abs(gb) <= tol) return b;
    const double denom = gb - ga;
    if (denom == 0.0) break;
    const double c = b - gb * (b - a) / denom;
    if (!std::isfinite(c)) break;
    a = b;
    ga = gb;
    b = c;
    gb = volume_defect(config, model, hbar, b, nullptr);
  }

  // Secant stalled; bracket by expansion around the starting point.
  const double step0 = std::max(std::abs(lam0), 1e-12) * 0.05;
  double lo = lam0, hi = lam0;
  double glo = volume_defect(config, model, hbar, lo, nullptr);
  if (!std::isfinite(glo))
    throw CalibrationError("dham: series diverged during calibration", best_l);
  bool bracketed = false;
  double other = 0.0, gother = 0.0;
  for (int k = 0; k < 60 && !bracketed; ++k) {
    const double step = step0 * std::pow(2.0, k);
    for (const double cand : {lam0 - step, lam0 + step}) {
      const double g = volume_defect(config, model, hbar, cand, nullptr);
      if (!std::isfinite(g)) continue;
      if (std::abs(g) < best_g) {
        best_g = std::abs(g);
        best_l = cand;
      }
      if (g == 0.0) return cand;
      if (glo * g < 0.0) {
        other = cand;
        gother = g;
        bracketed = true;
        break;
      }
    }
  }
  if (!bracketed)
    throw CalibrationError("dham: no sign change found for the volume defect",
                           best_l);
  lo = lam0;
  hi = other;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = volume_defect(config, model, hbar, mid, nullptr);
    if (!std::isfinite(gm))
      throw CalibrationError("dham: series diverged during bisection", best_l);
    if (std::abs(gm) <= tol) return mid;
    if (glo * gm < 0.0) {
      hi = mid;
      gother = gm;
    } else {
      lo = mid;
      glo = gm;
    }
    if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) {
      if (std::abs(gm) * dt <= config.lambda_tolerance * std::abs(model.grid.X))
        return mid;
      throw CalibrationError("dham: bisection converged outside tolerance", mid);
    }
  }
  throw CalibrationError("dham: calibration did not converge", best_l);
}

SolverReport dham_solve(const DhamConfig& config, const CostModel& model) {
  check_config(config, model.kernels);
  const auto t_start = std::chrono::steady_clock::now();

  std::vector<double> grid =
      config.hbar_grid.empty() ? default_hbar_grid() : config.hbar_grid;

  struct Eval {
    double hbar = 0.0;
    double lambda = 0.0;
    double residual = kInf;
    bool ok = false;
  };

  auto evaluate = [&](double hbar) {
    Eval e;
    e.hbar = hbar;
    if (!(hbar < 0.0)) return e;
    try {
      e.lambda = calibrate_lambda(config, model, hbar);
    } catch (const CalibrationError&) {
      return e;
    }
    DhamState s = dham_iterate(config, model, hbar, e.lambda);
    if (s.diverged) return e;
    e.residual =
        urysohn_residual(model.impact, model.kernels, s.solution(), e.lambda).squared;
    e.ok = std::isfinite(e.residual);
    return e;
  };

  std::vector<Eval> evals(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { evals[k] = evaluate(grid[k]); });

  auto better = [](const Eval& x, const Eval& y) {
    if (x.ok != y.ok) return x.ok;
    if (x.residual != y.residual) return x.residual < y.residual;
    return std::abs(x.hbar) < std::abs(y.hbar);
  };
  Eval best;
  for (const Eval& e : evals)
    if (better(e, best)) best = e;

  SolverReport report;
  report.solver = "dham";
  report.seed = 0;
  report.iterations = config.order;
  report.residual_curve.reserve(evals.size());
  for (const Eval& e : evals)
    report.residual_curve.emplace_back(e.hbar, e.residual);

  if (best.ok && config.refine && grid.size() >= 2) {
    double spacing = std::abs(grid.size() > 1 ? grid[1] - grid[0] : 1.0);
    std::vector<double> local;
    for (int k = -10; k <= 10; ++k) {
      const double h = best.hbar + k * spacing / 10.0;
      if (h < 0.0 && k != 0) local.push_back(h);
    }
    std::vector<Eval> le(local.size());
    parallel_for(local.size(), [&](std::size_t k) { le[k] = evaluate(local[k]); });
    for (const Eval& e : le)
      if (better(e, best)) best = e;
  }

  if (!best.ok) {
    report.converged = false;
    report.strategy = config.init;
    report.cost = expected_cost(model, config.init.rates);
    report.spread_component = spread_component(model, config.init.rates);
    report.constraint_violation = config.init.constraint_violation();
    report.message = "dham: every hbar in the grid diverged or failed calibration";
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
  }

  DhamState s = dham_iterate(config, model, best.hbar, best.lambda);
  Strategy out{s.solution(), model.grid};
  report.converged = true;
  report.hbar = best.hbar;
  report.lambda = best.lambda;
  report.squared_residual = best.residual;
  report.cost = expected_cost(model, out.rates);
  report.spread_component = spread_component(model, out.rates);
  report.constraint_violation = out.constraint_violation();
  report.strategy = std::move(out);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace optexec
