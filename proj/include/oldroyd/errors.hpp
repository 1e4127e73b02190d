#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace oldroyd {

/// A run-time numerical failure: loss of positive definiteness, a violated
/// time-step bound or a linear solve that missed its residual target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, std::vector<double> residual_history)
      : NumericalError(what), residual_history_(std::move(residual_history)) {}
  const std::vector<double>& residual_history() const { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

/// Malformed or incompatible checkpoint / config input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oldroyd
