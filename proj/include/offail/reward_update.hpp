#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string_view>
#include <vector>

#include "offail/mdp.hpp"
#include "offail/reward_params.hpp"
#include "offail/rng.hpp"

namespace offail {

/**
 * Trajectories tagged by the index of the policy that generated them.
 *
 * Window mode keeps exactly the batches of the `window` most recent policy
 * indices. Capacity mode additionally caps the total number of stored
 * trajectories (oldest evicted first) and is read through minibatches.
 */
class TrajectoryBuffer {
 public:
  static TrajectoryBuffer policy_window(Shape shape, std::size_t window, std::size_t batch);
  static TrajectoryBuffer with_capacity(Shape shape, std::size_t window, std::size_t batch,
                                        std::size_t capacity);

  const Shape& shape() const { return shape_; }
  std::size_t window() const { return window_; }
  std::size_t batch() const { return batch_; }
  /// 0 in window mode.
  std::size_t capacity() const { return capacity_; }
  bool capacity_mode() const { return capacity_ != 0; }

  bool empty() const { return batches_.empty(); }
  std::size_t num_trajectories() const;
  /// Retained policy indices, oldest first.
  std::vector<std::size_t> policy_indices() const;

  struct Batch {
    std::size_t policy_index = 0;
    std::vector<Trajectory> trajectories;
  };
  /// Oldest first.
  const std::deque<Batch>& batches() const { return batches_; }

  /// Append one policy's batch. Throws ContractViolation when the batch size
  /// differs from B, an index does not exceed the newest retained one, or a
  /// trajectory is malformed.
  void push(std::size_t policy_index, std::vector<Trajectory> trajectories);

 private:
  TrajectoryBuffer(Shape shape, std::size_t window, std::size_t batch, std::size_t capacity);

  Shape shape_;
  std::size_t window_;
  std::size_t batch_;
  std::size_t capacity_;
  std::deque<Batch> batches_;
};

void push_policy_data(TrajectoryBuffer& buffer, std::size_t policy_index,
                      std::vector<Trajectory> trajectories);

/// Reward step size eta and mixture weights beta over the window. beta[0]
/// weighs the most recent policy.
struct RewardStepConfig {
  double eta = 0.0;
  std::size_t window = 1;
  std::vector<double> beta;  ///< empty means uniform

  /// Throws InvalidConfig on eta <= 0, window < 1 or a malformed beta.
  void validate() const;
};

/**
 * beta-weighted empirical occupancy of the buffered data:
 *   d_mix_h = sum_n beta_n * d-hat(policy k-n)_h.
 * With uniform beta and equal batches this is the plain pooled frequency.
 * While fewer than N policies are buffered, beta is renormalized over the
 * ones present. Throws NoData on an empty buffer.
 */
OccupancyMeasure empirical_mixture_occupancy(const TrajectoryBuffer& buffer,
                                             std::span<const double> beta = {});

/// Pooled frequency of `minibatch` trajectories drawn without replacement
/// (all of them when fewer are stored). Capacity-mode counterpart of the above.
OccupancyMeasure minibatch_occupancy(const TrajectoryBuffer& buffer, std::size_t minibatch,
                                     Rng& rng);

/// grad_mu L = d_expert - d_agent; each step slice sums to zero.
StepTable reward_gradient(const OccupancyMeasure& expert, const OccupancyMeasure& agent);

/// Proj_[0,1]{mu + eta * gradient}, the projection being entrywise clamping.
RewardParams projected_ascent_step(const RewardParams& mu, const StepTable& gradient, double eta);
RewardParams projected_ascent_step(const RewardParams& mu, const StepTable& gradient,
                                   const RewardStepConfig& config);

/// L(pi, mu) = sum_h <d_expert_h - d_agent_h, mu_h>.
double ail_loss(const OccupancyMeasure& expert, const OccupancyMeasure& agent,
                const StepTable& mu);

enum class EtaPreset {
  kInvSqrtK,     ///< 1 / sqrt(K)
  kSqrtSAOverK,  ///< sqrt(S A / K)
  kMinigrid,     ///< 5 / sqrt(K)
};

EtaPreset parse_eta_preset(std::string_view name);
std::string_view to_string(EtaPreset preset);

/// Throws InvalidConfig for K < 1.
double theory_eta(std::size_t iters, EtaPreset preset = EtaPreset::kInvSqrtK,
                  std::size_t states = 1, std::size_t actions = 1);

}  // namespace offail
