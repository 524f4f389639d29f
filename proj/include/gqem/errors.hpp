#pragma once

#include <stdexcept>
#include <string>

namespace gqem {

/// Bad argument: out-of-range axis, unsupported chart pair, violated model constraint.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Elementary function evaluated outside its domain (ln/sqrt of a nonpositive value, 1/0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation needs more jet order than the inputs carry.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
  CapabilityError(const std::string& what, int required, int available)
      : std::runtime_error(what + " requires jet order >= " + std::to_string(required) +
                           " (have " + std::to_string(available) + ")"),
        required_(required),
        available_(available) {}

  int required() const noexcept { return required_; }
  int available() const noexcept { return available_; }

 private:
  int required_ = 0;
  int available_ = 0;
};

/// Metric singular or not positive definite at the evaluation point.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gqem
