#pragma once

#include <stdexcept>
#include <string>

namespace qgs {

/// Raised when an input violates a documented precondition or invariant.
/// The message starts with the name of the violated condition.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when two independent computations of the same quantity disagree,
/// or an iteration fails to converge where convergence is guaranteed.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace qgs
