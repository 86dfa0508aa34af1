#include "offail/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace offail {

std::string to_string(const Shape& shape) {
  return "(S=" + std::to_string(shape.states) + ", A=" + std::to_string(shape.actions) +
         ", H=" + std::to_string(shape.horizon) + ")";
}

namespace {

bool is_distribution(std::span<const double> p, double tol) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace

TabularMDP::TabularMDP(Shape shape, std::vector<double> transitions,
                       std::vector<double> initial_dist, StepTable true_reward)
    : shape_(shape),
      transitions_(std::move(transitions)),
      initial_(std::move(initial_dist)),
      true_reward_(std::move(true_reward)) {
  if (shape_.states == 0 || shape_.actions == 0 || shape_.horizon == 0) {
    throw ContractViolation("TabularMDP: empty dimension " + to_string(shape_));
  }
  if (transitions_.size() != shape_.cells() * shape_.states) {
    throw ContractViolation("TabularMDP: transition table has wrong size");
  }
  if (initial_.size() != shape_.states) {
    throw ContractViolation("TabularMDP: initial distribution has wrong size");
  }
  require_shape(shape_, true_reward_.shape(), "TabularMDP true reward");
  for (std::size_t h = 0; h < shape_.horizon; ++h) {
    for (std::size_t s = 0; s < shape_.states; ++s) {
      for (std::size_t a = 0; a < shape_.actions; ++a) {
        if (!is_distribution(transition(h, s, a), kProbTol)) {
          throw ContractViolation("TabularMDP: transition row (h=" + std::to_string(h) +
                                  ", s=" + std::to_string(s) + ", a=" + std::to_string(a) +
                                  ") is not a distribution");
        }
      }
    }
  }
  if (!is_distribution(initial_, kProbTol)) {
    throw ContractViolation("TabularMDP: initial distribution is not normalized");
  }
}

Policy::Policy(StepTable probs) : probs_(std::move(probs)) {
  const Shape& sh = probs_.shape();
  for (std::size_t h = 0; h < sh.horizon; ++h) {
    for (std::size_t s = 0; s < sh.states; ++s) {
      if (!is_distribution(probs_.row(h, s), kProbTol)) {
        throw ContractViolation("Policy: row (h=" + std::to_string(h) + ", s=" +
                                std::to_string(s) + ") is not a distribution");
      }
    }
  }
}

Policy Policy::uniform(Shape shape) {
  return Policy(StepTable(shape, 1.0 / static_cast<double>(shape.actions)));
}

OccupancyMeasure::OccupancyMeasure(StepTable dist) : dist_(std::move(dist)) {
  for (std::size_t h = 0; h < dist_.shape().horizon; ++h) {
    if (!is_distribution(dist_.step(h), kProbTol)) {
      throw InvalidOccupancy("OccupancyMeasure: step " + std::to_string(h) +
                             " is not a distribution");
    }
  }
}

double OccupancyMeasure::state_mass(std::size_t h, std::size_t s) const {
  const auto r = dist_.row(h, s);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

std::vector<std::vector<double>> state_visitation(const TabularMDP& mdp, const Policy& policy) {
  require_shape(mdp.shape(), policy.shape(), "state_visitation");
  const std::size_t S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  std::vector<std::vector<double>> nu(H, std::vector<double>(S, 0.0));
  std::copy(mdp.initial_dist().begin(), mdp.initial_dist().end(), nu[0].begin());
  for (std::size_t h = 0; h + 1 < H; ++h) {
    for (std::size_t s = 0; s < S; ++s) {
      if (nu[h][s] == 0.0) continue;
      for (std::size_t a = 0; a < A; ++a) {
        const double w = nu[h][s] * policy(h, s, a);
        if (w == 0.0) continue;
        const auto p = mdp.transition(h, s, a);
        for (std::size_t s2 = 0; s2 < S; ++s2) nu[h + 1][s2] += w * p[s2];
      }
    }
  }
  return nu;
}

OccupancyMeasure compute_occupancy(const TabularMDP& mdp, const Policy& policy) {
  const auto nu = state_visitation(mdp, policy);
  StepTable d(mdp.shape());
  for (std::size_t h = 0; h < mdp.horizon(); ++h) {
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
      for (std::size_t a = 0; a < mdp.num_actions(); ++a) d(h, s, a) = nu[h][s] * policy(h, s, a);
    }
  }
  return OccupancyMeasure(std::move(d));
}

double policy_value(const OccupancyMeasure& occupancy, const StepTable& reward) {
  require_shape(occupancy.shape(), reward.shape(), "policy_value");
  const auto d = occupancy.table().flat();
  const auto r = reward.flat();
  return std::inner_product(d.begin(), d.end(), r.begin(), 0.0);
}

double policy_value(const TabularMDP& mdp, const Policy& policy, const StepTable& reward) {
  require_shape(mdp.shape(), reward.shape(), "policy_value");
  return policy_value(compute_occupancy(mdp, policy), reward);
}

StepTable q_values(const TabularMDP& mdp, const Policy& policy, const StepTable& reward) {
  require_shape(mdp.shape(), policy.shape(), "q_values");
  require_shape(mdp.shape(), reward.shape(), "q_values");
  const std::size_t S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  StepTable q(mdp.shape());
  std::vector<double> v_next(S, 0.0), v(S, 0.0);
  for (std::size_t h = H; h-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double vs = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        const auto p = mdp.transition(h, s, a);
        const double cont = std::inner_product(p.begin(), p.end(), v_next.begin(), 0.0);
        q(h, s, a) = reward(h, s, a) + cont;
        vs += policy(h, s, a) * q(h, s, a);
      }
      v[s] = vs;
    }
    std::swap(v, v_next);
  }
  return q;
}

double policy_value_backward(const TabularMDP& mdp, const Policy& policy, const StepTable& reward) {
  const StepTable q = q_values(mdp, policy, reward);
  double j = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    double v = 0.0;
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) v += policy(0, s, a) * q(0, s, a);
    j += mdp.initial_dist()[s] * v;
  }
  return j;
}

namespace {

// Backward Bellman optimality recursion; returns V*_0 and fills the greedy table.
std::vector<double> solve_optimal(const TabularMDP& mdp, const StepTable& reward,
                                  StepTable* greedy) {
  require_shape(mdp.shape(), reward.shape(), "optimal_value");
  const std::size_t S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  std::vector<double> v_next(S, 0.0), v(S, 0.0);
  for (std::size_t h = H; h-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_a = 0;
      for (std::size_t a = 0; a < A; ++a) {
        const auto p = mdp.transition(h, s, a);
        const double q =
            reward(h, s, a) + std::inner_product(p.begin(), p.end(), v_next.begin(), 0.0);
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      v[s] = best;
      if (greedy != nullptr) (*greedy)(h, s, best_a) = 1.0;
    }
    std::swap(v, v_next);
  }
  return v_next;
}

}  // namespace

double optimal_value(const TabularMDP& mdp, const StepTable& reward) {
  const auto v = solve_optimal(mdp, reward, nullptr);
  const auto nu = mdp.initial_dist();
  return std::inner_product(nu.begin(), nu.end(), v.begin(), 0.0);
}

Policy optimal_policy(const TabularMDP& mdp, const StepTable& reward) {
  StepTable greedy(mdp.shape());
  solve_optimal(mdp, reward, &greedy);
  return Policy(std::move(greedy));
}

std::vector<Trajectory> sample_trajectories(const TabularMDP& mdp, const Policy& policy,
                                            std::size_t count, Rng& rng,
                                            std::size_t policy_index) {
  require_shape(mdp.shape(), policy.shape(), "sample_trajectories");
  if (count == 0) throw ContractViolation("sample_trajectories: count must be >= 1");
  const std::size_t H = mdp.horizon();
  std::vector<Trajectory> out(count);
  for (auto& traj : out) {
    traj.policy_index = policy_index;
    traj.steps.reserve(H);
    std::size_t s = rng.categorical(mdp.initial_dist());
    for (std::size_t h = 0; h < H; ++h) {
      const std::size_t a = rng.categorical(policy.row(h, s));
      traj.steps.push_back({h, s, a});
      if (h + 1 < H) s = rng.categorical(mdp.transition(h, s, a));
    }
  }
  return out;
}

std::vector<Trajectory> sample_trajectories(const TabularMDP& mdp, const Policy& policy,
                                            std::size_t count, std::uint64_t seed,
                                            std::size_t policy_index) {
  Rng rng(seed);
  return sample_trajectories(mdp, policy, count, rng, policy_index);
}

double trajectory_return(const Trajectory& trajectory, const StepTable& reward) {
  double total = 0.0;
  for (const Step& st : trajectory.steps) total += reward(st.h, st.state, st.action);
  return total;
}

OccupancyMeasure empirical_occupancy(Shape shape, std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw NoData("empirical_occupancy: no trajectories");
  StepTable d(shape);
  const double w = 1.0 / static_cast<double>(trajectories.size());
  for (const Trajectory& traj : trajectories) {
    if (traj.steps.size() != shape.horizon) {
      throw ContractViolation("empirical_occupancy: trajectory length differs from horizon");
    }
    for (const Step& st : traj.steps) {
      if (st.h >= shape.horizon || st.state >= shape.states || st.action >= shape.actions) {
        throw ContractViolation("empirical_occupancy: step out of range");
      }
      d(st.h, st.state, st.action) += w;
    }
  }
  return OccupancyMeasure(std::move(d));
}

double flow_residual(const TabularMDP& mdp, const StepTable& occupancy) {
  require_shape(mdp.shape(), occupancy.shape(), "flow_residual");
  const std::size_t S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  double worst = 0.0;
  std::vector<double> inflow(S);
  for (std::size_t h = 0; h < H; ++h) {
    if (h == 0) {
      std::copy(mdp.initial_dist().begin(), mdp.initial_dist().end(), inflow.begin());
    } else {
      std::fill(inflow.begin(), inflow.end(), 0.0);
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          const double w = occupancy(h - 1, s, a);
          if (w == 0.0) continue;
          const auto p = mdp.transition(h - 1, s, a);
          for (std::size_t s2 = 0; s2 < S; ++s2) inflow[s2] += w * p[s2];
        }
      }
    }
    for (std::size_t s = 0; s < S; ++s) {
      const auto r = occupancy.row(h, s);
      const double mass = std::accumulate(r.begin(), r.end(), 0.0);
      worst = std::max(worst, std::abs(mass - inflow[s]));
    }
  }
  return worst;
}

Policy occupancy_to_policy(const OccupancyMeasure& occupancy) {
  const Shape& sh = occupancy.shape();
  StepTable probs(sh);
  const double uniform = 1.0 / static_cast<double>(sh.actions);
  for (std::size_t h = 0; h < sh.horizon; ++h) {
    for (std::size_t s = 0; s < sh.states; ++s) {
      const double mass = occupancy.state_mass(h, s);
      auto out = probs.row(h, s);
      if (mass > 0.0) {
        const auto in = occupancy.table().row(h, s);
        for (std::size_t a = 0; a < sh.actions; ++a) out[a] = in[a] / mass;
      } else {
        std::fill(out.begin(), out.end(), uniform);
      }
    }
  }
  return Policy(std::move(probs));
}

Policy occupancy_to_policy(const TabularMDP& mdp, const OccupancyMeasure& occupancy) {
  const double residual = flow_residual(mdp, occupancy.table());
  if (residual > kFlowTol) {
    throw InvalidOccupancy("occupancy_to_policy: flow constraint violated by " +
                           std::to_string(residual));
  }
  return occupancy_to_policy(occupancy);
}

OccupancyMeasure mix_occupancies(std::span<const OccupancyMeasure> occupancies,
                                 std::span<const double> weights) {
  if (occupancies.empty()) throw NoData("mix_occupancies: no components");
  if (occupancies.size() != weights.size()) {
    throw ContractViolation("mix_occupancies: weight count differs from component count");
  }
  StepTable mix(occupancies.front().shape());
  for (std::size_t n = 0; n < occupancies.size(); ++n) {
    require_shape(mix.shape(), occupancies[n].shape(), "mix_occupancies");
    const auto src = occupancies[n].table().flat();
    auto dst = mix.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += weights[n] * src[i];
  }
  return OccupancyMeasure(std::move(mix));
}

}  // namespace offail
