#pragma once

#include <stdexcept>
#include <string>

namespace optexec {

/// Evaluation requested at a point where a derivative of the impact
/// function diverges (e.g. concave power law at zero rate).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A bracketing or iterative search failed to locate its target.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A multiplier calibration failed; carries the best value reached.
class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double best_lambda)
      : std::runtime_error(what), best_lambda_(best_lambda) {}
  double best_lambda() const { return best_lambda_; }

 private:
  double best_lambda_;
};

}  // namespace optexec
