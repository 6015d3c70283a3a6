// Test-only reference implementations, kept independent of the library code
// paths they validate.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

// Adaptive Simpson quadrature on a smooth integrand.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 28) {
  struct Impl {
    const std::function<double(double)>& f;
    double run(double a, double m, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) const {
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return run(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             run(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Impl{f}.run(a, m, b, fa, fm, fb, whole, tol, depth);
}

// Double integral of |t-s|^-gamma over the cell pair [a1,a1+h] x [a2,a2+h]
// (equal cell widths), via the overlap-density reduction
//   I = int w(tau) tau^-gamma dtau,   w piecewise linear,
// with the substitution u = tau^(1-gamma) removing the endpoint singularity.
// Purely geometric; independent of the closed-form second-difference formula.
inline double kernel_cell_integral(double gamma, double a1, double a2, double h) {
  const double off = std::abs(a2 - a1);
  const double q = 1.0 - gamma;
  if (off > 1e-9 * h && off < h * (1.0 - 1e-9))
    throw std::invalid_argument("kernel_cell_integral: cells must be grid-aligned");
  // same cell: w(tau) = h - tau on [0, h], integrand even in tau -> 2x
  if (off <= 1e-9 * h) {
    auto g = [&](double u) {
      const double tau = std::pow(u, 1.0 / q);
      return (h - tau) / q;
    };
    return 2.0 * adaptive_simpson(g, 0.0, std::pow(h, q), 1e-14);
  }
  // disjoint or adjacent cells: w is a triangle on [off-h, off+h]
  const double lo = std::max(off - h, 0.0);
  auto g = [&](double u) {
    const double tau = std::pow(u, 1.0 / q);
    return (h - std::abs(tau - off)) / q;
  };
  // split at the kink tau = off
  const double u_lo = std::pow(lo, q), u_mid = std::pow(off, q),
               u_hi = std::pow(off + h, q);
  return adaptive_simpson(g, u_lo, u_mid, 1e-14) +
         adaptive_simpson(g, u_mid, u_hi, 1e-14);
}

// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Gradient of a scalar field by central differences.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Bordered-Hessian determinant-sign chain for one linear constraint
// sum v_i = const: borders are the constraint gradient. Returns +1 for a
// minimum, -1 for a maximum, 0 for saddle/indeterminate.
inline int bordered_hessian_classify(const Eigen::MatrixXd& H) {
  const int n = static_cast<int>(H.rows());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
  B(0, 0) = 0.0;
  for (int i = 0; i < n; ++i) {
    B(0, i + 1) = -1.0;
    B(i + 1, 0) = -1.0;
  }
  B.block(1, 1, n, n) = H;
  bool is_min = true, is_max = true;
  for (int j = 3; j <= n + 1; ++j) {
    const double det = B.topLeftCorner(j, j).determinant();
    if (det == 0.0) return 0;
    if (!(-det > 0.0)) is_min = false;
    const double sign = (j - 1) % 2 == 0 ? 1.0 : -1.0;
    if (!(sign * det > 0.0)) is_max = false;
  }
  if (is_min) return 1;
  if (is_max) return -1;
  return 0;
}

}  // namespace oracles
