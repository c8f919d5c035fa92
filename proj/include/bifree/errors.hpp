#pragma once

#include <stdexcept>
#include <string>

namespace bifree {

/// Input that violates an operation's contract (bad dimensions, out-of-range
/// indices, non-PSD covariance, malformed files, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical precondition of an experiment does not hold, e.g. a family
/// handed to the orbital lab is not itself a microstate of its marginal.
class PreconditionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Floating-point state that can only come from corrupted arithmetic, such as
/// a trace of a self-adjoint word with a visible imaginary part.
class NumericalCorruption : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace bifree
