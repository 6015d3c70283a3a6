#include "optexec/tables.hpp"

#include <cmath>
#include <stdexcept>

namespace optexec::tables {

const std::vector<CostRow>& reference_costs(double gamma) {
  static const std::vector<CostRow> g045 = {
      {1.00, 0.0117, 0.0116, 0.0116}, {0.95, 0.0132, 0.0130, 0.0130},
      {0.90, 0.0148, 0.0146, 0.0143}, {0.85, 0.0166, 0.0164, 0.0162},
      {0.80, 0.0186, 0.0184, 0.0179}, {0.75, 0.0209, 0.0206, 0.0198},
      {0.70, 0.0234, 0.0231, 0.0218}, {0.65, 0.0263, 0.0260, 0.0235},
      {0.60, 0.0295, 0.0291, 0.0251}, {0.55, 0.0331, 0.0327, 0.0275},
  };
  static const std::vector<CostRow> g05 = {
      {1.00, 0.0133, 0.0132, 0.0131}, {0.95, 0.0150, 0.0148, 0.0148},
      {0.90, 0.0168, 0.0166, 0.0164}, {0.85, 0.0188, 0.0186, 0.0185},
      {0.80, 0.0211, 0.0209, 0.0204}, {0.75, 0.0237, 0.0234, 0.0227},
      {0.70, 0.0266, 0.0263, 0.0249}, {0.65, 0.0298, 0.0295, 0.0274},
      {0.60, 0.0335, 0.0331, 0.0297}, {0.55, 0.0376, 0.0372, 0.0323},
      {0.50, 0.0422, 0.0417, 0.0347},
  };
  if (std::abs(gamma - 0.45) < 1e-12) return g045;
  if (std::abs(gamma - 0.5) < 1e-12) return g05;
  throw std::invalid_argument("reference_costs: values available for gamma in {0.45, 0.5}");
}

const std::vector<OptimizerRow>& reference_optimizer_costs(double gamma) {
  static const std::vector<OptimizerRow> g045 = {
      {1.00, 0.0116, 0.0115, 0.0115},  {0.95, 0.0130, 0.0128, 0.0129},
      {0.90, 0.0143, 0.0136, 0.0140},  {0.85, 0.0162, 0.0139, 0.0151},
      {0.80, 0.0179, 0.0138, 0.0162},  {0.75, 0.0198, 0.0132, 0.0169},
      {0.70, 0.0218, 0.0117, 0.0184},  {0.65, 0.0235, 0.0092, 0.0191},
      {0.60, 0.0251, 0.0047, 0.0201},  {0.55, 0.0275, -0.0029, 0.0212},
  };
  static const std::vector<OptimizerRow> g05 = {
      {1.00, 0.0131, 0.0131, 0.0131}, {0.95, 0.0148, 0.0147, 0.0147},
      {0.90, 0.0164, 0.0158, 0.0162}, {0.85, 0.0185, 0.0166, 0.0176},
      {0.80, 0.0204, 0.0170, 0.0188}, {0.75, 0.0227, 0.0169, 0.0202},
      {0.70, 0.0249, 0.0163, 0.0220}, {0.65, 0.0274, 0.0146, 0.0238},
      {0.60, 0.0297, 0.0120, 0.0245}, {0.55, 0.0323, 0.0075, 0.0262},
      {0.50, 0.0347, 0.0003, 0.0278},
  };
  if (std::abs(gamma - 0.45) < 1e-12) return g045;
  if (std::abs(gamma - 0.5) < 1e-12) return g05;
  throw std::invalid_argument(
      "reference_optimizer_costs: values available for gamma in {0.45, 0.5}");
}

const std::vector<ConcaveConvexRow>& reference_concave_convex() {
  static const std::vector<ConcaveConvexRow> rows = {
      {0.1, 1.0755, 1.1485, 0.3193, -0.00245, 0.03266},
      {0.5, 0.4256, 0.4835, 0.0911, 0.01674, 0.03782},
      {1.0, 0.2678, 0.3229, 0.0443, 0.02887, 0.04428},
      {2.0, 0.1639, 0.2170, 0.0292, 0.04752, 0.05718},
  };
  return rows;
}

const std::array<std::array<double, 5>, 5>& reference_distance_matrix() {
  static const std::array<std::array<double, 5>, 5> D = {{
      {0.0000, 0.0780, 0.0753, 0.0890, 0.0617},
      {0.0780, 0.0000, 0.0757, 0.0757, 0.0582},
      {0.0753, 0.0757, 0.0000, 0.0799, 0.0581},
      {0.0890, 0.0757, 0.0799, 0.0000, 0.0576},
      {0.0617, 0.0582, 0.0581, 0.0576, 0.0000},
  }};
  return D;
}

const std::vector<DhamHeadline>& reference_dham_headline() {
  static const std::vector<DhamHeadline> rows = {
      {"vwap", -60.3, 2.5e-6},
      {"gss", -55.7, 3.2e-6},
  };
  return rows;
}

double reference_spread_cost(double r) {
  if (std::abs(r - 0.5) < 1e-12) return 0.026;
  if (std::abs(r - 0.1) < 1e-12) return 5.9e-3;
  throw std::invalid_argument("reference_spread_cost: values available for r in {0.1, 0.5}");
}

}  // namespace optexec::tables
