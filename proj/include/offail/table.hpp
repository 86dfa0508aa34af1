#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "offail/errors.hpp"

namespace offail {

/// Dimensions of a finite-horizon tabular problem. Steps are 0-based
/// internally: h = 0 is the first decision step, h = horizon - 1 the last.
struct Shape {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::size_t horizon = 0;

  friend bool operator==(const Shape&, const Shape&) = default;
  std::size_t cells() const { return states * actions * horizon; }
};

std::string to_string(const Shape& shape);

/// Dense row-major table indexed [h][s][a]. The storage type behind policies,
/// occupancy measures, rewards and Q-functions.
class StepTable {
 public:
  StepTable() = default;
  explicit StepTable(Shape shape, double fill = 0.0)
      : shape_(shape), values_(shape.cells(), fill) {}

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t h, std::size_t s, std::size_t a) const {
    return values_[index(h, s, a)];
  }
  double& operator()(std::size_t h, std::size_t s, std::size_t a) {
    return values_[index(h, s, a)];
  }

  /// The A entries for a fixed (h, s).
  std::span<const double> row(std::size_t h, std::size_t s) const {
    return {values_.data() + index(h, s, 0), shape_.actions};
  }
  std::span<double> row(std::size_t h, std::size_t s) {
    return {values_.data() + index(h, s, 0), shape_.actions};
  }

  /// The S*A entries for a fixed step h, state-major.
  std::span<const double> step(std::size_t h) const {
    return {values_.data() + index(h, 0, 0), shape_.states * shape_.actions};
  }
  std::span<double> step(std::size_t h) {
    return {values_.data() + index(h, 0, 0), shape_.states * shape_.actions};
  }

  std::span<const double> flat() const { return values_; }
  std::span<double> flat() { return values_; }

  friend bool operator==(const StepTable&, const StepTable&) = default;

 private:
  std::size_t index(std::size_t h, std::size_t s, std::size_t a) const {
    return (h * shape_.states + s) * shape_.actions + a;
  }

  Shape shape_;
  std::vector<double> values_;
};

inline void require_shape(const Shape& expected, const Shape& actual, const char* what) {
  if (!(expected == actual)) {
    throw ContractViolation(std::string(what) + ": shape mismatch, expected " +
                            to_string(expected) + " got " + to_string(actual));
  }
}

}  // namespace offail
