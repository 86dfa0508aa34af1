#include "offail/reward_update.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace offail {

RewardParams::RewardParams(StepTable mu) : mu_(std::move(mu)) {
  for (double x : mu_.flat()) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ContractViolation("RewardParams: entry " + std::to_string(x) + " outside [0, 1]");
    }
  }
}

TrajectoryBuffer::TrajectoryBuffer(Shape shape, std::size_t window, std::size_t batch,
                                   std::size_t capacity)
    : shape_(shape), window_(window), batch_(batch), capacity_(capacity) {
  if (window_ < 1) throw ContractViolation("TrajectoryBuffer: window N must be >= 1");
  if (batch_ < 1) throw ContractViolation("TrajectoryBuffer: batch B must be >= 1");
}

TrajectoryBuffer TrajectoryBuffer::policy_window(Shape shape, std::size_t window,
                                                 std::size_t batch) {
  return TrajectoryBuffer(shape, window, batch, 0);
}

TrajectoryBuffer TrajectoryBuffer::with_capacity(Shape shape, std::size_t window,
                                                 std::size_t batch, std::size_t capacity) {
  if (capacity < 1) throw ContractViolation("TrajectoryBuffer: capacity must be >= 1");
  return TrajectoryBuffer(shape, window, batch, capacity);
}

std::size_t TrajectoryBuffer::num_trajectories() const {
  std::size_t n = 0;
  for (const Batch& b : batches_) n += b.trajectories.size();
  return n;
}

std::vector<std::size_t> TrajectoryBuffer::policy_indices() const {
  std::vector<std::size_t> out;
  out.reserve(batches_.size());
  for (const Batch& b : batches_) out.push_back(b.policy_index);
  return out;
}

void TrajectoryBuffer::push(std::size_t policy_index, std::vector<Trajectory> trajectories) {
  if (trajectories.size() != batch_) {
    throw ContractViolation("TrajectoryBuffer: expected a batch of " + std::to_string(batch_) +
                            " trajectories, got " + std::to_string(trajectories.size()));
  }
  if (!batches_.empty() && policy_index <= batches_.back().policy_index) {
    throw ContractViolation("TrajectoryBuffer: policy indices must increase");
  }
  for (const Trajectory& t : trajectories) {
    if (t.steps.size() != shape_.horizon) {
      throw ContractViolation("TrajectoryBuffer: trajectory length differs from horizon");
    }
  }
  for (Trajectory& t : trajectories) t.policy_index = policy_index;
  batches_.push_back({policy_index, std::move(trajectories)});

  while (batches_.size() > window_) batches_.pop_front();
  if (capacity_mode()) {
    std::size_t stored = num_trajectories();
    while (stored > capacity_) {
      auto& oldest = batches_.front().trajectories;
      oldest.erase(oldest.begin());
      --stored;
      if (oldest.empty()) batches_.pop_front();
    }
  }
}

void push_policy_data(TrajectoryBuffer& buffer, std::size_t policy_index,
                      std::vector<Trajectory> trajectories) {
  buffer.push(policy_index, std::move(trajectories));
}

void RewardStepConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidConfig("reward step size eta must be > 0, got " + std::to_string(eta));
  }
  if (window < 1) throw InvalidConfig("reward window N must be >= 1");
  if (!beta.empty()) {
    if (beta.size() != window) throw InvalidConfig("beta must have exactly N entries");
    double sum = 0.0;
    for (double b : beta) {
      if (!(b >= 0.0)) throw InvalidConfig("beta entries must be >= 0");
      sum += b;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidConfig("beta must sum to 1");
  }
}

OccupancyMeasure empirical_mixture_occupancy(const TrajectoryBuffer& buffer,
                                             std::span<const double> beta) {
  if (buffer.empty()) throw NoData("empirical_mixture_occupancy: buffer is empty");
  const auto& batches = buffer.batches();
  const std::size_t present = batches.size();

  std::vector<double> weights(present, 1.0);
  if (!beta.empty()) {
    if (beta.size() < present) {
      throw ContractViolation("empirical_mixture_occupancy: beta shorter than the window");
    }
    // beta[0] weighs the newest batch, which is stored last.
    for (std::size_t i = 0; i < present; ++i) weights[i] = beta[present - 1 - i];
  } else {
    // Pooled frequency; uniform over policies whenever batches are equal.
    for (std::size_t i = 0; i < present; ++i) {
      weights[i] = static_cast<double>(batches[i].trajectories.size());
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw NoData("empirical_mixture_occupancy: all weights are zero");

  StepTable mix(buffer.shape());
  for (std::size_t i = 0; i < present; ++i) {
    const auto& trajs = batches[i].trajectories;
    if (weights[i] == 0.0 || trajs.empty()) continue;
    const double w = weights[i] / total / static_cast<double>(trajs.size());
    for (const Trajectory& t : trajs) {
      for (const Step& st : t.steps) mix(st.h, st.state, st.action) += w;
    }
  }
  return OccupancyMeasure(std::move(mix));
}

OccupancyMeasure minibatch_occupancy(const TrajectoryBuffer& buffer, std::size_t minibatch,
                                     Rng& rng) {
  if (buffer.empty()) throw NoData("minibatch_occupancy: buffer is empty");
  if (minibatch < 1) throw ContractViolation("minibatch_occupancy: minibatch must be >= 1");
  std::vector<const Trajectory*> pool;
  for (const auto& b : buffer.batches()) {
    for (const Trajectory& t : b.trajectories) pool.push_back(&t);
  }
  const std::size_t take = std::min(minibatch, pool.size());
  // Partial Fisher-Yates: the first `take` slots become the sample.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  StepTable d(buffer.shape());
  const double w = 1.0 / static_cast<double>(take);
  for (std::size_t i = 0; i < take; ++i) {
    for (const Step& st : pool[i]->steps) d(st.h, st.state, st.action) += w;
  }
  return OccupancyMeasure(std::move(d));
}

StepTable reward_gradient(const OccupancyMeasure& expert, const OccupancyMeasure& agent) {
  require_shape(expert.shape(), agent.shape(), "reward_gradient");
  StepTable g(expert.shape());
  const auto e = expert.table().flat();
  const auto d = agent.table().flat();
  auto out = g.flat();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = e[i] - d[i];
  return g;
}

RewardParams projected_ascent_step(const RewardParams& mu, const StepTable& gradient, double eta) {
  require_shape(mu.shape(), gradient.shape(), "projected_ascent_step");
  StepTable next(mu.shape());
  const auto cur = mu.table().flat();
  const auto g = gradient.flat();
  auto out = next.flat();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(g[i])) throw ContractViolation("projected_ascent_step: non-finite gradient");
    out[i] = std::clamp(cur[i] + eta * g[i], 0.0, 1.0);
  }
  return RewardParams(std::move(next));
}

RewardParams projected_ascent_step(const RewardParams& mu, const StepTable& gradient,
                                   const RewardStepConfig& config) {
  config.validate();
  return projected_ascent_step(mu, gradient, config.eta);
}

double ail_loss(const OccupancyMeasure& expert, const OccupancyMeasure& agent,
                const StepTable& mu) {
  require_shape(expert.shape(), agent.shape(), "ail_loss");
  require_shape(expert.shape(), mu.shape(), "ail_loss");
  return policy_value(expert, mu) - policy_value(agent, mu);
}

EtaPreset parse_eta_preset(std::string_view name) {
  if (name == "inv-sqrt-k") return EtaPreset::kInvSqrtK;
  if (name == "sqrt-sa-over-k") return EtaPreset::kSqrtSAOverK;
  if (name == "minigrid") return EtaPreset::kMinigrid;
  throw InvalidConfig("unknown eta preset '" + std::string(name) +
                      "' (expected inv-sqrt-k, sqrt-sa-over-k or minigrid)");
}

std::string_view to_string(EtaPreset preset) {
  switch (preset) {
    case EtaPreset::kInvSqrtK:
      return "inv-sqrt-k";
    case EtaPreset::kSqrtSAOverK:
      return "sqrt-sa-over-k";
    case EtaPreset::kMinigrid:
      return "minigrid";
  }
  return "?";
}

double theory_eta(std::size_t iters, EtaPreset preset, std::size_t states, std::size_t actions) {
  if (iters < 1) throw InvalidConfig("eta preset needs K >= 1");
  const double k = static_cast<double>(iters);
  switch (preset) {
    case EtaPreset::kInvSqrtK:
      return 1.0 / std::sqrt(k);
    case EtaPreset::kSqrtSAOverK:
      return std::sqrt(static_cast<double>(states) * static_cast<double>(actions) / k);
    case EtaPreset::kMinigrid:
      return 5.0 / std::sqrt(k);
  }
  throw InvalidConfig("unknown eta preset");
}

}  // namespace offail
