#pragma once

#include <stdexcept>
#include <string>

namespace fkpde {

// Bad arguments and violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base of everything a solver can raise at run time.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public SolverError {
 public:
  using SolverError::SolverError;
};

class IllConditionedGrid : public NumericError {
 public:
  explicit IllConditionedGrid(double condition)
      : NumericError("collocation matrix is ill-conditioned (condition estimate " +
                     std::to_string(condition) + ")"),
        condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class DegreeCapExceeded : public NumericError {
 public:
  DegreeCapExceeded(int degree, int cap)
      : NumericError("adaptation requires degree " + std::to_string(degree) +
                     " above the configured cap " + std::to_string(cap)),
        degree_(degree),
        cap_(cap) {}

  int degree() const noexcept { return degree_; }
  int cap() const noexcept { return cap_; }

 private:
  int degree_;
  int cap_;
};

// A simulated path hit the step guard without leaving the domain.
class NonExitError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace fkpde
