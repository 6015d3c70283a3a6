#include "optexec/impact.hpp"

#include <cmath>
#include <stdexcept>

#include "optexec/errors.hpp"

namespace optexec {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_finite(double v) {
  if (!std::isfinite(v)) throw std::domain_error("impact: non-finite trading rate");
}

// delta (delta-1) ... (delta-k+1)
double falling_factorial(double delta, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= delta - i;
  return r;
}

// Magnitude-side evaluation, u = |v| >= 0.
double eval_pos(const PowerLaw& m, double u) { return std::pow(u, m.delta); }
double eval_pos(const PerturbedPowerLaw& m, double u) {
  return std::pow(m.epsilon + u, m.delta);
}
double eval_pos(const ConcaveConvex& m, double u) {
  const double V = m.market_rate;
  return m.c * (std::pow(u / (u + V), m.delta) + m.d * u * (u + V) / (V * V));
}

double deriv_pos(const PowerLaw& m, double u) {
  if (m.delta == 1.0) return 1.0;
  if (u == 0.0 && m.delta < 1.0)
    throw SingularityError("power-law derivative diverges at v = 0");
  return m.delta * std::pow(u, m.delta - 1.0);
}
double deriv_pos(const PerturbedPowerLaw& m, double u) {
  if (m.epsilon + u == 0.0 && m.delta < 1.0)
    throw SingularityError("perturbed power-law derivative diverges at v = -epsilon");
  return m.delta * std::pow(m.epsilon + u, m.delta - 1.0);
}
double deriv_pos(const ConcaveConvex& m, double u) {
  const double V = m.market_rate;
  if (u == 0.0 && m.delta < 1.0)
    throw SingularityError("concave-convex derivative diverges at v = 0");
  const double w = u / (u + V);
  return m.c * (m.delta * std::pow(w, m.delta - 1.0) * V / ((u + V) * (u + V)) +
                m.d * (2.0 * u + V) / (V * V));
}

double second_deriv_pos(const PowerLaw& m, double u) {
  const double coef = m.delta * (m.delta - 1.0);
  if (coef == 0.0) return 0.0;
  if (u == 0.0 && m.delta < 2.0)
    throw SingularityError("power-law second derivative diverges at v = 0");
  return coef * std::pow(u, m.delta - 2.0);
}
double second_deriv_pos(const PerturbedPowerLaw& m, double u) {
  const double coef = m.delta * (m.delta - 1.0);
  if (coef == 0.0) return 0.0;
  if (m.epsilon + u == 0.0 && m.delta < 2.0)
    throw SingularityError("perturbed power-law second derivative diverges");
  return coef * std::pow(m.epsilon + u, m.delta - 2.0);
}
double second_deriv_pos(const ConcaveConvex& m, double u) {
  const double V = m.market_rate;
  if (u == 0.0 && m.delta < 2.0)
    throw SingularityError("concave-convex second derivative diverges at v = 0");
  const double s = u + V;
  const double w = u / s;
  return m.c * (m.delta * (m.delta - 1.0) * std::pow(w, m.delta - 2.0) * V * V / (s * s * s * s) -
                2.0 * m.delta * std::pow(w, m.delta - 1.0) * V / (s * s * s) +
                2.0 * m.d / (V * V));
}

// Taylor coefficients of t(p)^alpha given those of t(p), t_0 > 0
// (J.C.P. Miller recurrence).
std::vector<double> series_pow(const std::vector<double>& t, double alpha) {
  const int n = static_cast<int>(t.size()) - 1;
  std::vector<double> b(n + 1);
  b[0] = std::pow(t[0], alpha);
  for (int m = 1; m <= n; ++m) {
    double s = 0.0;
    for (int j = 1; j <= m; ++j) s += ((alpha + 1.0) * j - m) * t[j] * b[m - j];
    b[m] = s / (m * t[0]);
  }
  return b;
}

// f^(k)(u) for u > 0, k = 0..n.
std::vector<double> derivs_pos(const PowerLaw& m, double u, int n) {
  std::vector<double> out(n + 1);
  for (int k = 0; k <= n; ++k)
    out[k] = falling_factorial(m.delta, k) * std::pow(u, m.delta - k);
  return out;
}
std::vector<double> derivs_pos(const PerturbedPowerLaw& m, double u, int n) {
  std::vector<double> out(n + 1);
  for (int k = 0; k <= n; ++k)
    out[k] = falling_factorial(m.delta, k) * std::pow(m.epsilon + u, m.delta - k);
  return out;
}
std::vector<double> derivs_pos(const ConcaveConvex& m, double u, int n) {
  const double V = m.market_rate;
  // Taylor series of (u+p)/(u+V+p) about p = 0, then raised to delta.
  std::vector<double> t(n + 1);
  t[0] = u / (u + V);
  double denom = u + V;
  for (int k = 1; k <= n; ++k) {
    denom *= (u + V);
    t[k] = ((k % 2 == 1) ? V : -V) / denom;
  }
  std::vector<double> b = series_pow(t, m.delta);
  // Polynomial part d (u+p)(u+p+V)/V^2 contributes up to p^2 only.
  const double dv2 = m.d / (V * V);
  b[0] += dv2 * u * (u + V);
  if (n >= 1) b[1] += dv2 * (2.0 * u + V);
  if (n >= 2) b[2] += dv2;
  double factorial = 1.0;
  std::vector<double> out(n + 1);
  for (int k = 0; k <= n; ++k) {
    if (k > 0) factorial *= k;
    out[k] = m.c * factorial * b[k];
  }
  return out;
}

}  // namespace

double eval(const ImpactModel& model, double v) {
  check_finite(v);
  const double u = std::abs(v);
  return sgn(v) * std::visit([&](const auto& m) { return eval_pos(m, u); }, model);
}

double deriv(const ImpactModel& model, double v) {
  check_finite(v);
  const double u = std::abs(v);
  return std::visit([&](const auto& m) { return deriv_pos(m, u); }, model);
}

double second_deriv(const ImpactModel& model, double v) {
  check_finite(v);
  const double u = std::abs(v);
  const double f2 = std::visit([&](const auto& m) { return second_deriv_pos(m, u); }, model);
  return sgn(v) * f2;
}

std::vector<double> derivatives_at(const ImpactModel& model, double v, int n) {
  check_finite(v);
  if (n < 0) throw std::invalid_argument("derivatives_at: n must be >= 0");
  const bool at_zero = (v == 0.0);
  if (at_zero && !std::holds_alternative<PerturbedPowerLaw>(model))
    throw SingularityError("impact derivatives diverge at v = 0");
  const double u = std::abs(v);
  std::vector<double> out =
      std::visit([&](const auto& m) { return derivs_pos(m, u, n); }, model);
  if (v < 0.0) {
    // f odd: f^(k)(-u) = (-1)^(k+1) f^(k)(u).
    for (int k = 0; k <= n; k += 2) out[k] = -out[k];
  }
  return out;
}

double inflection_rate(const ConcaveConvex& model) {
  if (!(model.d > 0.0))
    throw std::invalid_argument("inflection_rate: requires a convex term (d > 0)");
  const double V = model.market_rate;
  auto f2 = [&](double u) { return second_deriv_pos(model, u); };

  // f'' < 0 near zero and > 0 once the convex term dominates; walk a
  // multiplicative grid in (0, 100 V] to find the sign change.
  double lo = 1e-9 * V;
  if (f2(lo) >= 0.0) throw SearchError("inflection_rate: no concave region found");
  double hi = lo;
  bool bracketed = false;
  while (hi < 100.0 * V) {
    hi = std::min(hi * 2.0, 100.0 * V);
    if (f2(hi) > 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed)
    throw SearchError("inflection_rate: no sign change of f'' in (0, 100 V)");

  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (f2(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double exponent_of(const ImpactModel& model) {
  return std::visit([](const auto& m) { return m.delta; }, model);
}

std::string name_of(const ImpactModel& model) {
  struct Namer {
    std::string operator()(const PowerLaw&) const { return "power_law"; }
    std::string operator()(const PerturbedPowerLaw&) const { return "perturbed_power_law"; }
    std::string operator()(const ConcaveConvex&) const { return "concave_convex"; }
  };
  return std::visit(Namer{}, model);
}

}  // namespace optexec
