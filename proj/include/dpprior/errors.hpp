#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dpprior {

// Caller passed an argument outside the documented range (bad k, empty input,
// malformed elicitation problem, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Real-valued argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The operation needs a proper prior (or Jeffreys with n >= 2) and got
// something else.
class UnsupportedPrior : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested targets cannot be attained by the chosen family.
class InfeasibleTargets : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative solver ran out of budget. Carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last)
      : std::runtime_error(what), last_iterate(std::move(last)) {}
  std::vector<double> last_iterate;
};

}  // namespace dpprior
