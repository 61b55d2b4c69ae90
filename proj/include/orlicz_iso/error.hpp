#pragma once

#include <stdexcept>
#include <string>

namespace oiso {

/// Argument outside the mathematical domain of an operation (negative t, a >= b, tol <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Shape mismatch between related inputs (value count vs cell count, empty block, ...).
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative routine failed to converge. Carries the last bracket.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double lo, double hi)
      : std::runtime_error(what + " (bracket [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

}  // namespace oiso
