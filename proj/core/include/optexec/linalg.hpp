#pragma once

#include <Eigen/Core>

namespace optexec {

/// Orthonormal basis of the zero-sum subspace {x in R^n : sum(x) = 0},
/// returned as the n x (n-1) Helmert sub-matrix. Columns are the tangent
/// directions of the volume-constraint hyperplane; Z^T Z = I, 1^T Z = 0.
inline Eigen::MatrixXd zero_sum_basis(int n) {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, n - 1);
  for (int k = 1; k < n; ++k) {
    const double a = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) Z(i, k - 1) = a;
    Z(k, k - 1) = -static_cast<double>(k) * a;
  }
  return Z;
}

}  // namespace optexec
