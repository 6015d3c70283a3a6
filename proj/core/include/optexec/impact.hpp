#pragma once

#include <string>
#include <variant>
#include <vector>

namespace optexec {

/// f(v) = sign(v) |v|^delta. The proportionality constant is fixed to one.
struct PowerLaw {
  double delta = 0.5;
};

/// f(v) = sign(v) (epsilon + |v|)^delta with 0 < epsilon << 1, which keeps
/// f' bounded at v = 0 at the price of a jump of 2 epsilon^delta across it.
struct PerturbedPowerLaw {
  double delta = 0.5;
  double epsilon = 1e-6;
};

/// Concave at low rates, convex beyond the inflection rate: for v > 0
///   f(v) = c [ (v/(v+V))^delta + d v(v+V)/V^2 ],
/// extended to v < 0 by odd symmetry. V is the market rate X_M / T.
struct ConcaveConvex {
  double c = 1.0;
  double delta = 0.55;
  double d = 0.0;
  double market_rate = 1.0;  // V
};

using ImpactModel = std::variant<PowerLaw, PerturbedPowerLaw, ConcaveConvex>;

/// Instantaneous impact f(v). Computed on |v| then signed, so odd symmetry
/// holds bit for bit. Throws std::domain_error on non-finite v.
double eval(const ImpactModel& model, double v);

/// f'(v). Throws SingularityError where the derivative diverges (power law
/// with delta < 1 at v = 0; callers substitute PerturbedPowerLaw or clamp).
double deriv(const ImpactModel& model, double v);

/// f''(v). Same domain restrictions as deriv.
double second_deriv(const ImpactModel& model, double v);

/// f^(k)(v) for k = 0..n, at a rate v of either sign (v != 0 except for
/// PerturbedPowerLaw). Closed-form falling factorials for the power laws;
/// series composition for ConcaveConvex.
std::vector<double> derivatives_at(const ImpactModel& model, double v, int n);

/// The rate v* > 0 where the convexity of a ConcaveConvex model changes,
/// i.e. f''(v*) = 0, located by bracketing and bisection (|error| < 1e-8).
/// Requires d > 0; throws SearchError if no bracket exists in (0, 100 V).
double inflection_rate(const ConcaveConvex& model);

double exponent_of(const ImpactModel& model);
std::string name_of(const ImpactModel& model);

}  // namespace optexec
