#pragma once

#include <stdexcept>
#include <string>

namespace offail {

/// Caller broke a precondition (dimension mismatch, index out of range, bad batch size).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A table claimed to be an occupancy measure fails normalization or flow.
class InvalidOccupancy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration value rejected (parse error, unknown key, invariant).
class InvalidConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An estimator was asked for a result with no samples to back it.
class NoData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A theoretical invariant checked at runtime (test mode) was violated.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace offail
