#pragma once

#include <stdexcept>
#include <string>

namespace conekit {

// Evaluation outside a coordinate chart or branch domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Singular or ill-conditioned linear algebra.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double condition_number)
      : std::runtime_error(what + " (condition number " + std::to_string(condition_number) + ")"),
        condition_(condition_number) {}
  double condition_number() const { return condition_; }

 private:
  double condition_;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A discrete family selector that violates one of the admissibility constraints.
class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace conekit
