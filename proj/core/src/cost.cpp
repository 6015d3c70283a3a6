#include "optexec/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "optexec/errors.hpp"

namespace optexec {

namespace {

void check_rates(const Eigen::VectorXd& rates, const CostModel& model) {
  if (rates.size() != model.kernels.size())
    throw std::invalid_argument("cost: rate vector length does not match the grid");
  if (!rates.allFinite()) throw std::domain_error("cost: non-finite rates");
}

// f' and f'' with |v| bounded away from the power-law singularity. The
// perturbed variant is already finite everywhere and is left untouched.
double clamped_deriv(const CostModel& model, double v) {
  double u = std::abs(v);
  if (u < model.deriv_clamp && !std::holds_alternative<PerturbedPowerLaw>(model.impact))
    u = model.deriv_clamp;
  return deriv(model.impact, u);
}

double clamped_second_deriv(const CostModel& model, double v) {
  if (v == 0.0) return 0.0;  // odd function; clamped sign convention
  double u = std::abs(v);
  if (u < model.deriv_clamp && !std::holds_alternative<PerturbedPowerLaw>(model.impact))
    u = model.deriv_clamp;
  const double s = second_deriv(model.impact, u);
  return v < 0.0 ? -s : s;
}

}  // namespace

CostModel make_cost_model(const ImpactModel& impact, const KernelMatrices& kernels,
                          const GridSpec& grid, double spread) {
  grid.validate();
  if (spread < 0.0) throw std::invalid_argument("make_cost_model: spread must be >= 0");
  CostModel m{impact, kernels, grid, spread, 0.0, 0.0};
  const double rate_scale = std::abs(grid.X) > 0.0 ? std::abs(grid.X) / grid.T : 1.0;
  m.abs_smoothing = 1e-8 * rate_scale;
  m.deriv_clamp = 1e-10 * rate_scale;
  return m;
}

double spread_component(const CostModel& model, const Eigen::VectorXd& rates) {
  if (model.spread == 0.0) return 0.0;
  return model.spread * model.grid.dt() * rates.cwiseAbs().sum();
}

double expected_cost(const CostModel& model, const Eigen::VectorXd& rates) {
  check_rates(rates, model);
  const int n = static_cast<int>(rates.size());
  Eigen::VectorXd fv(n);
  for (int j = 0; j < n; ++j) fv[j] = eval(model.impact, rates[j]);
  return rates.dot(model.kernels.A * fv) + spread_component(model, rates);
}

double cost_and_gradient(const CostModel& model, const Eigen::VectorXd& rates,
                         Eigen::VectorXd& grad) {
  check_rates(rates, model);
  const int n = static_cast<int>(rates.size());
  Eigen::VectorXd fv(n), fp(n);
  for (int j = 0; j < n; ++j) {
    fv[j] = eval(model.impact, rates[j]);
    fp[j] = clamped_deriv(model, rates[j]);
  }
  const Eigen::VectorXd p = model.kernels.A * fv;            // (A f(v))_k
  const Eigen::VectorXd q = model.kernels.A.transpose() * rates;  // (A^T v)_k
  grad = p + fp.cwiseProduct(q);
  double cost = rates.dot(p);
  if (model.spread != 0.0) {
    const double coef = model.spread * model.grid.dt();
    const double eps2 = model.abs_smoothing * model.abs_smoothing;
    for (int k = 0; k < n; ++k) {
      cost += coef * std::abs(rates[k]);
      grad[k] += coef * rates[k] / std::sqrt(rates[k] * rates[k] + eps2);
    }
  }
  return cost;
}

Eigen::VectorXd cost_gradient(const CostModel& model, const Eigen::VectorXd& rates) {
  Eigen::VectorXd grad;
  cost_and_gradient(model, rates, grad);
  return grad;
}

Eigen::MatrixXd cost_hessian(const CostModel& model, const Eigen::VectorXd& rates) {
  check_rates(rates, model);
  const int n = static_cast<int>(rates.size());
  Eigen::VectorXd fp(n);
  for (int k = 0; k < n; ++k) fp[k] = clamped_deriv(model, rates[k]);
  const Eigen::MatrixXd M = model.kernels.A * fp.asDiagonal();
  Eigen::MatrixXd H = M + M.transpose();
  const Eigen::VectorXd q = model.kernels.A.transpose() * rates;
  for (int k = 0; k < n; ++k)
    H(k, k) += clamped_second_deriv(model, rates[k]) * q[k];
  if (model.spread != 0.0) {
    const double coef = model.spread * model.grid.dt();
    const double eps2 = model.abs_smoothing * model.abs_smoothing;
    for (int k = 0; k < n; ++k) {
      const double s2 = rates[k] * rates[k] + eps2;
      H(k, k) += coef * eps2 / (s2 * std::sqrt(s2));
    }
  }
  return H;
}

Eigen::MatrixXd build_F_matrix(const ImpactModel& impact, const Eigen::VectorXd& rates) {
  const int n = static_cast<int>(rates.size());
  Eigen::VectorXd fv(n), fp(n);
  for (int k = 0; k < n; ++k) {
    fv[k] = eval(impact, rates[k]);
    fp[k] = deriv(impact, rates[k]);
  }
  Eigen::MatrixXd F(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) F(i, j) = fv[j];
    for (int j = i + 1; j < n; ++j) F(i, j) = rates[j] * fp[i];
  }
  return F;
}

UrysohnResidual urysohn_residual(const ImpactModel& impact, const KernelMatrices& kernels,
                                 const Eigen::VectorXd& rates, double lambda) {
  const Eigen::MatrixXd F = build_F_matrix(impact, rates);
  UrysohnResidual r;
  r.pointwise = (kernels.G.cwiseProduct(F)).rowwise().sum().array() - lambda;
  r.squared = r.pointwise.squaredNorm();
  return r;
}

double toy_cost(double v1, double gamma, double delta, double X) {
  const ImpactModel f = PowerLaw{delta};
  const double v2 = 2.0 * X - v1;
  const double q = 2.0 - gamma;
  return std::pow(0.5, q) / ((1.0 - gamma) * q) *
         (v1 * eval(f, v1) + v2 * eval(f, v2) + (std::pow(2.0, q) - 2.0) * v2 * eval(f, v1));
}

double toy_global_minimizer(double gamma, double delta, double X) {
  const double lo = -2.0 * X, hi = 2.0 * X;
  const int n = 8000;
  const double h = (hi - lo) / n;
  double best_x = lo, best_c = toy_cost(lo, gamma, delta, X);
  for (int k = 1; k <= n; ++k) {
    const double x = lo + k * h;
    const double c = toy_cost(x, gamma, delta, X);
    if (c < best_c) {
      best_c = c;
      best_x = x;
    }
  }
  // Golden-section refinement inside the bracketing cells.
  double a = std::max(lo, best_x - h), b = std::min(hi, best_x + h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double c1 = toy_cost(x1, gamma, delta, X), c2 = toy_cost(x2, gamma, delta, X);
  while (b - a > 1e-12 * std::max(1.0, std::abs(X))) {
    if (c1 < c2) {
      b = x2;
      x2 = x1;
      c2 = c1;
      x1 = b - inv_phi * (b - a);
      c1 = toy_cost(x1, gamma, delta, X);
    } else {
      a = x1;
      x1 = x2;
      c1 = c2;
      x2 = a + inv_phi * (b - a);
      c2 = toy_cost(x2, gamma, delta, X);
    }
  }
  return 0.5 * (a + b);
}

double toy_sign_transition_delta(double gamma, double X) {
  double lo = 0.5, hi = 0.75;
  auto positive = [&](double delta) { return toy_global_minimizer(gamma, delta, X) > 0.0; };
  if (positive(lo) || !positive(hi))
    throw SearchError("toy_sign_transition_delta: no sign change in [0.5, 0.75]");
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (positive(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double spread_coefficient(double r, double gamma, const ImpactModel& impact,
                          double X, double T) {
  if (r < 0.0) throw std::invalid_argument("spread_coefficient: r must be >= 0");
  return r * eval(impact, X / T) * std::pow(T, 1.0 - gamma) /
         ((1.0 - gamma) * (2.0 - gamma));
}

double gradient_scale(const CostModel& model) {
  const Eigen::VectorXd vwap =
      Eigen::VectorXd::Constant(model.kernels.size(), model.grid.mean_rate());
  const double s = cost_gradient(model, vwap).lpNorm<Eigen::Infinity>();
  return std::max(s, 1e-300);
}

}  // namespace optexec
