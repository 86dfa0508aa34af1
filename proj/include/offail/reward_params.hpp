#pragma once

#include "offail/table.hpp"

namespace offail {

/// Adversary's tabular reward mu_h(s,a); every entry lies in [0, 1].
class RewardParams {
 public:
  /// Throws ContractViolation if any entry leaves the box.
  explicit RewardParams(StepTable mu);

  static RewardParams constant(Shape shape, double value) {
    return RewardParams(StepTable(shape, value));
  }

  const Shape& shape() const { return mu_.shape(); }
  double operator()(std::size_t h, std::size_t s, std::size_t a) const { return mu_(h, s, a); }
  const StepTable& table() const { return mu_; }

  friend bool operator==(const RewardParams&, const RewardParams&) = default;

 private:
  StepTable mu_;
};

}  // namespace offail
