#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "offail/mdp.hpp"
#include "offail/reward_params.hpp"

namespace offail {

/// Visitation counts n_h(s,a) and n_h(s,a,s'). The final step of an episode
/// has no successor and only increments n_h(s,a), so the invariant
/// sum_s' n_h(s,a,s') = n_h(s,a) holds for h < H-1 and the last step is
/// tracked separately.
class TransitionCounts {
 public:
  explicit TransitionCounts(Shape shape);

  const Shape& shape() const { return shape_; }

  std::uint64_t visits(std::size_t h, std::size_t s, std::size_t a) const {
    return n_sa_[cell(h, s, a)];
  }
  std::uint64_t transitions(std::size_t h, std::size_t s, std::size_t a, std::size_t next) const {
    return n_sas_[cell(h, s, a) * shape_.states + next];
  }
  std::span<const std::uint64_t> transition_row(std::size_t h, std::size_t s, std::size_t a) const {
    return {n_sas_.data() + cell(h, s, a) * shape_.states, shape_.states};
  }

  /// Throws ContractViolation on a step outside the table or a malformed episode.
  void add(const Trajectory& trajectory);
  void add(std::span<const Trajectory> trajectories);

  /// Direct count injection; used to build estimator fixtures.
  void add_transition(std::size_t h, std::size_t s, std::size_t a, std::size_t next,
                      std::uint64_t times = 1);

 private:
  std::size_t cell(std::size_t h, std::size_t s, std::size_t a) const {
    return (h * shape_.states + s) * shape_.actions + a;
  }

  Shape shape_;
  std::vector<std::uint64_t> n_sa_;
  std::vector<std::uint64_t> n_sas_;
};

TransitionCounts update_counts(TransitionCounts counts, std::span<const Trajectory> trajectories);

/// P-hat_h(.|s,a) = n_h(s,a,.) / n_h(s,a), or uniform when (h,s,a) is unvisited.
std::vector<double> empirical_transition(const TransitionCounts& counts, std::size_t h,
                                         std::size_t s, std::size_t a);

/// Hoeffding-style exploration bonus
///   b = scale * H * sqrt(log(2 S A H K / delta) / max(1, n_h(s,a))).
struct BonusConfig {
  double scale = 1.0;
  double delta = 0.1;
  std::size_t total_iters = 1;

  /// Throws InvalidConfig unless delta is in (0,1), scale >= 0 and K >= 1.
  void validate() const;
};

double ucb_bonus(const TransitionCounts& counts, std::size_t h, std::size_t s, std::size_t a,
                 const BonusConfig& config);

struct OptimisticQ {
  StepTable q;                         ///< clipped Q-hat_h(s,a)
  std::vector<std::vector<double>> v;  ///< V-hat_h(s) indexed [h][s]
};

/**
 * Backward recursion from the last step with V-hat after the horizon at zero:
 *   Q_h(s,a) = min{mu_h(s,a) + b_h(s,a) + sum_s' P_h(s'|s,a) V_{h+1}(s'), H - h}
 *   V_h(s)   = sum_a pi_h(a|s) Q_h(s,a)
 * with 0-based h, so the clip H - h equals the remaining number of steps.
 *
 * With `known_transitions` the true model replaces the empirical one and the
 * bonus is forced to zero.
 */
OptimisticQ optimistic_q_recursion(const TransitionCounts& counts, const Policy& policy,
                                   const RewardParams& reward, const BonusConfig& bonus,
                                   const TabularMDP* known_transitions = nullptr);

}  // namespace offail
