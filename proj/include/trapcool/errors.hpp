#pragma once

#include <stdexcept>
#include <string>

namespace trapcool {

/// Invalid problem parameters (v1 <= 0, v2 < 1, gamma < 1, bad JSON).
class InvalidSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// State left the admissible region x1 > 0.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument outside its documented range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Caller broke an operation precondition (e.g. non-monotone betas).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A closed-form planner cannot be evaluated for this spec. `inequality()`
/// names the violated condition, e.g. "gamma^2*v2 > 1".
class InfeasibleSpecError : public std::runtime_error {
 public:
  InfeasibleSpecError(std::string planner, std::string inequality)
      : std::runtime_error(planner + ": infeasible, requires " + inequality),
        planner_(std::move(planner)),
        inequality_(std::move(inequality)) {}

  const std::string& planner() const noexcept { return planner_; }
  const std::string& inequality() const noexcept { return inequality_; }

 private:
  std::string planner_;
  std::string inequality_;
};

/// Bisection bracket without a sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric integration came within epsilon of the x1 = 0 singularity.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative numeric routine failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trapcool
