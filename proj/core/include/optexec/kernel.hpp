#pragma once

#include <Eigen/Core>

#include "optexec/grid.hpp"
#include "optexec/impact.hpp"

namespace optexec {

/// Discretization of the decay kernel |t-s|^-gamma on an N-subinterval grid.
/// G is the symmetric Toeplitz matrix of cell-pair double integrals; A is
/// its lower triangle with halved diagonal, so A + A^T = G and the expected
/// cost of a rate vector v is v^T A f(v).
struct KernelMatrices {
  double gamma = 0.5;
  Eigen::MatrixXd G;
  Eigen::MatrixXd A;

  int size() const { return static_cast<int>(G.rows()); }
};

/// Cell-pair integrals of |t-s|^-gamma via the exact second-difference
/// formula. Requires 0 < gamma < 1 (weakly singular, integrable kernel).
Eigen::MatrixXd build_kernel_matrix(double gamma, const GridSpec& grid);

/// Lower-triangular cost matrix: A_ij = 0 for j > i, A_ii = G_ii / 2,
/// A_ij = G_ij for j < i.
Eigen::MatrixXd build_cost_matrix(const Eigen::MatrixXd& G);

KernelMatrices make_kernel_matrices(double gamma, const GridSpec& grid);

/// Constant-rate execution, v_i = X / T.
Strategy vwap_strategy(const GridSpec& grid);

/// The linear-impact optimal profile c / [t (T-t)]^((1-gamma)/2), sampled at
/// subinterval midpoints (the continuous solution diverges at the endpoints)
/// and rescaled multiplicatively so the executed volume equals X exactly.
Strategy gss_strategy(double gamma, const GridSpec& grid);

/// The closed-form normalization constant of the continuous profile.
double gss_normalization_constant(double gamma, double X, double T);

/// Analytic cost of the constant-rate strategy,
///   C = X f(X/T) T^(1-gamma) / ((1-gamma)(2-gamma)),
/// which the discrete double sum reproduces exactly for any impact model.
double vwap_cost_closed_form(const ImpactModel& impact, double gamma,
                             const GridSpec& grid);

}  // namespace optexec
