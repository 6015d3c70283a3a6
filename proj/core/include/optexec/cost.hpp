#pragma once

#include <Eigen/Core>

#include "optexec/grid.hpp"
#include "optexec/impact.hpp"
#include "optexec/kernel.hpp"

namespace optexec {

/// Everything needed to evaluate the discretized expected execution cost
///   C(v) = sum_ij v_i f(v_j) A_ij + spread * dt * sum_i |v_i|.
/// Immutable after construction and shareable across threads.
///
/// The reported cost always uses the exact |v|; abs_smoothing enters the
/// gradient and Hessian only. deriv_clamp bounds |v| away from zero inside
/// f' and f'' so gradient-based optimizers survive concave power laws.
struct CostModel {
  ImpactModel impact;
  KernelMatrices kernels;
  GridSpec grid;
  double spread = 0.0;         // delta_S, price units (half bid-ask spread)
  double abs_smoothing = 0.0;  // eps_abs for the |v| term
  double deriv_clamp = 0.0;    // eps_grad for f', f''
};

/// Builds a model with the default smoothing scales
/// (eps_abs = 1e-8 X/T, eps_grad = 1e-10 X/T).
CostModel make_cost_model(const ImpactModel& impact, const KernelMatrices& kernels,
                          const GridSpec& grid, double spread = 0.0);

double expected_cost(const CostModel& model, const Eigen::VectorXd& rates);
inline double expected_cost(const CostModel& model, const Strategy& s) {
  return expected_cost(model, s.rates);
}
/// The spread term alone: spread * dt * sum |v_i|.
double spread_component(const CostModel& model, const Eigen::VectorXd& rates);

/// dC/dv_k = (A f(v))_k + f'(v_k) (A^T v)_k + spread * dt * v_k / sqrt(v_k^2 + eps^2).
Eigen::VectorXd cost_gradient(const CostModel& model, const Eigen::VectorXd& rates);

/// Fused cost + gradient (optimizer hot path; one pass over f and A).
double cost_and_gradient(const CostModel& model, const Eigen::VectorXd& rates,
                         Eigen::VectorXd& grad);

/// H_kl = f'(v_l) A_kl + f'(v_k) A_lk
///        + delta_kl [ f''(v_k) (A^T v)_k + spread smoothing term ].
Eigen::MatrixXd cost_hessian(const CostModel& model, const Eigen::VectorXd& rates);

/// The two-branch nonlinearity on the grid:
/// F_ij = f(v_j) for j <= i, F_ij = v_j f'(v_i) for j > i.
Eigen::MatrixXd build_F_matrix(const ImpactModel& impact, const Eigen::VectorXd& rates);

struct UrysohnResidual {
  double squared = 0.0;
  Eigen::VectorXd pointwise;  // r_i = -lambda + sum_j G_ij F_ij(v)
};

/// Stationarity defect of the discretized Urysohn equation.
UrysohnResidual urysohn_residual(const ImpactModel& impact, const KernelMatrices& kernels,
                                 const Eigen::VectorXd& rates, double lambda);

/// Two-interval cost with T = 1 and v_2 = 2X - v_1 implied by the constraint:
/// C = (1/2)^(2-g) / ((1-g)(2-g)) [v1 f(v1) + v2 f(v2) + (2^(2-g) - 2) v2 f(v1)].
double toy_cost(double v1, double gamma, double delta, double X);

/// Global minimizer of toy_cost over v1 in [-2X, 2X] (grid scan plus
/// golden-section refinement).
double toy_global_minimizer(double gamma, double delta, double X);

/// The exponent where the global minimizer's v1 changes sign, located by
/// bisection on delta within [0.5, 0.75].
double toy_sign_transition_delta(double gamma, double X);

/// delta_S = r f(X/T) T^(1-gamma) / ((1-gamma)(2-gamma)): the half-spread that
/// makes the VWAP spread cost an r-fraction of the VWAP impact cost.
double spread_coefficient(double r, double gamma, const ImpactModel& impact,
                          double X, double T);

/// Characteristic magnitude of cost-gradient entries for this model; used to
/// scale stationarity tolerances.
double gradient_scale(const CostModel& model);

}  // namespace optexec
