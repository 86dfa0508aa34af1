#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "offail/rng.hpp"
#include "offail/table.hpp"

namespace offail {

inline constexpr double kProbTol = 1e-9;
inline constexpr double kFlowTol = 1e-8;

/**
 * Finite-horizon undiscounted tabular MDP.
 *
 * Transitions are stored densely as P_h(s'|s,a) indexed [h][s][a][s']. The
 * true reward is the environment's evaluation signal and may be negative; the
 * imitation learner never reads it.
 */
class TabularMDP {
 public:
  /// Validates every transition row and the initial distribution; throws
  /// ContractViolation when a row is negative or does not sum to one.
  TabularMDP(Shape shape, std::vector<double> transitions, std::vector<double> initial_dist,
             StepTable true_reward);

  const Shape& shape() const { return shape_; }
  std::size_t num_states() const { return shape_.states; }
  std::size_t num_actions() const { return shape_.actions; }
  std::size_t horizon() const { return shape_.horizon; }

  std::span<const double> transition(std::size_t h, std::size_t s, std::size_t a) const {
    return {transitions_.data() + ((h * shape_.states + s) * shape_.actions + a) * shape_.states,
            shape_.states};
  }
  std::span<const double> initial_dist() const { return initial_; }
  const StepTable& true_reward() const { return true_reward_; }

 private:
  Shape shape_;
  std::vector<double> transitions_;
  std::vector<double> initial_;
  StepTable true_reward_;
};

/// Per-step stochastic policy pi_h(a|s). Rows are validated on construction.
class Policy {
 public:
  explicit Policy(StepTable probs);

  static Policy uniform(Shape shape);

  const Shape& shape() const { return probs_.shape(); }
  double operator()(std::size_t h, std::size_t s, std::size_t a) const { return probs_(h, s, a); }
  std::span<const double> row(std::size_t h, std::size_t s) const { return probs_.row(h, s); }
  const StepTable& table() const { return probs_; }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  StepTable probs_;
};

/// Per-step state-action visitation distribution d_h(s,a). Each step slice is
/// validated to be a probability distribution; flow consistency with a
/// particular MDP is checked separately by check_flow.
class OccupancyMeasure {
 public:
  explicit OccupancyMeasure(StepTable dist);

  const Shape& shape() const { return dist_.shape(); }
  double operator()(std::size_t h, std::size_t s, std::size_t a) const { return dist_(h, s, a); }
  const StepTable& table() const { return dist_; }

  /// State marginal sum_a d_h(s,a).
  double state_mass(std::size_t h, std::size_t s) const;

 private:
  StepTable dist_;
};

struct Step {
  std::size_t h = 0;
  std::size_t state = 0;
  std::size_t action = 0;

  friend bool operator==(const Step&, const Step&) = default;
};

/// One episode: exactly H steps with h = 0..H-1 in order, tagged with the
/// index of the policy iterate that generated it.
struct Trajectory {
  std::vector<Step> steps;
  std::size_t policy_index = 0;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Forward DP: nu_0 = initial, nu_{h+1}(s') = sum P_h(s'|s,a) nu_h(s) pi_h(a|s).
OccupancyMeasure compute_occupancy(const TabularMDP& mdp, const Policy& policy);

/// State visitation nu_h(s) of the policy, indexed [h][s].
std::vector<std::vector<double>> state_visitation(const TabularMDP& mdp, const Policy& policy);

/// sum_h <d_h, reward_h>; the reward may be any table of the MDP's shape.
double policy_value(const TabularMDP& mdp, const Policy& policy, const StepTable& reward);
double policy_value(const OccupancyMeasure& occupancy, const StepTable& reward);

/// Policy evaluation by backward Bellman recursion. Independent of
/// compute_occupancy; used to cross-check policy_value.
double policy_value_backward(const TabularMDP& mdp, const Policy& policy, const StepTable& reward);

/// Q^pi_h(s,a) under the true transitions, by backward recursion.
StepTable q_values(const TabularMDP& mdp, const Policy& policy, const StepTable& reward);

/// Optimal value max_pi J(pi, reward) by backward DP over the true model.
double optimal_value(const TabularMDP& mdp, const StepTable& reward);

/// Deterministic greedy policy for the reward; ties go to the lowest action index.
Policy optimal_policy(const TabularMDP& mdp, const StepTable& reward);

/// Roll out `count` episodes. Deterministic for a given generator state.
std::vector<Trajectory> sample_trajectories(const TabularMDP& mdp, const Policy& policy,
                                            std::size_t count, Rng& rng,
                                            std::size_t policy_index = 0);
std::vector<Trajectory> sample_trajectories(const TabularMDP& mdp, const Policy& policy,
                                            std::size_t count, std::uint64_t seed,
                                            std::size_t policy_index = 0);

/// Sum of `reward` along a trajectory.
double trajectory_return(const Trajectory& trajectory, const StepTable& reward);

/// Per-step empirical frequency of (s,a) over the trajectories.
OccupancyMeasure empirical_occupancy(Shape shape, std::span<const Trajectory> trajectories);

/// Largest violation of the flow constraints of `mdp` by `occupancy`.
double flow_residual(const TabularMDP& mdp, const StepTable& occupancy);

/// pi_h(a|s) = d_h(s,a) / sum_a' d_h(s,a'); unvisited states get the uniform row.
Policy occupancy_to_policy(const OccupancyMeasure& occupancy);

/// As above, but first rejects occupancies that are not flow-consistent with
/// `mdp` (InvalidOccupancy).
Policy occupancy_to_policy(const TabularMDP& mdp, const OccupancyMeasure& occupancy);

/// Convex combination sum_n weights[n] * occupancies[n].
OccupancyMeasure mix_occupancies(std::span<const OccupancyMeasure> occupancies,
                                 std::span<const double> weights);

}  // namespace offail
