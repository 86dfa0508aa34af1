#include "offail/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace offail {

TransitionCounts::TransitionCounts(Shape shape)
    : shape_(shape), n_sa_(shape.cells(), 0), n_sas_(shape.cells() * shape.states, 0) {}

void TransitionCounts::add_transition(std::size_t h, std::size_t s, std::size_t a,
                                      std::size_t next, std::uint64_t times) {
  if (h >= shape_.horizon || s >= shape_.states || a >= shape_.actions || next >= shape_.states) {
    throw ContractViolation("TransitionCounts: index out of range");
  }
  n_sa_[cell(h, s, a)] += times;
  n_sas_[cell(h, s, a) * shape_.states + next] += times;
}

void TransitionCounts::add(const Trajectory& trajectory) {
  const auto& steps = trajectory.steps;
  if (steps.size() != shape_.horizon) {
    throw ContractViolation("TransitionCounts: trajectory has " + std::to_string(steps.size()) +
                            " steps, horizon is " + std::to_string(shape_.horizon));
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Step& st = steps[i];
    if (st.h != i || st.state >= shape_.states || st.action >= shape_.actions) {
      throw ContractViolation("TransitionCounts: step " + std::to_string(i) + " out of range");
    }
  }
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    add_transition(i, steps[i].state, steps[i].action, steps[i + 1].state);
  }
  const Step& last = steps.back();
  n_sa_[cell(last.h, last.state, last.action)] += 1;
}

void TransitionCounts::add(std::span<const Trajectory> trajectories) {
  for (const Trajectory& t : trajectories) add(t);
}

TransitionCounts update_counts(TransitionCounts counts, std::span<const Trajectory> trajectories) {
  counts.add(trajectories);
  return counts;
}

std::vector<double> empirical_transition(const TransitionCounts& counts, std::size_t h,
                                         std::size_t s, std::size_t a) {
  const std::size_t S = counts.shape().states;
  const auto row = counts.transition_row(h, s, a);
  // Successor counts, not n_h(s,a): the final step has visits but no successors.
  const std::uint64_t total = std::accumulate(row.begin(), row.end(), std::uint64_t{0});
  std::vector<double> p(S, 1.0 / static_cast<double>(S));
  if (total == 0) return p;
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < S; ++i) p[i] = static_cast<double>(row[i]) * inv;
  return p;
}

void BonusConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidConfig("bonus delta must lie in (0, 1), got " + std::to_string(delta));
  }
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidConfig("bonus scale must be finite and >= 0");
  }
  if (total_iters < 1) throw InvalidConfig("bonus needs total iterations K >= 1");
}

double ucb_bonus(const TransitionCounts& counts, std::size_t h, std::size_t s, std::size_t a,
                 const BonusConfig& config) {
  config.validate();
  const Shape& sh = counts.shape();
  const double H = static_cast<double>(sh.horizon);
  const double log_term =
      std::log(2.0 * static_cast<double>(sh.states) * static_cast<double>(sh.actions) * H *
               static_cast<double>(config.total_iters) / config.delta);
  const double n = std::max<double>(1.0, static_cast<double>(counts.visits(h, s, a)));
  return config.scale * H * std::sqrt(log_term / n);
}

OptimisticQ optimistic_q_recursion(const TransitionCounts& counts, const Policy& policy,
                                   const RewardParams& reward, const BonusConfig& bonus,
                                   const TabularMDP* known_transitions) {
  const Shape& sh = counts.shape();
  require_shape(sh, policy.shape(), "optimistic_q_recursion policy");
  require_shape(sh, reward.shape(), "optimistic_q_recursion reward");
  if (known_transitions != nullptr) {
    require_shape(sh, known_transitions->shape(), "optimistic_q_recursion model");
  } else {
    bonus.validate();
  }
  const std::size_t S = sh.states, A = sh.actions, H = sh.horizon;

  OptimisticQ out{StepTable(sh), std::vector<std::vector<double>>(H, std::vector<double>(S, 0.0))};
  std::vector<double> v_next(S, 0.0);
  std::vector<double> p_hat;
  for (std::size_t h = H; h-- > 0;) {
    const double cap = static_cast<double>(H - h);
    for (std::size_t s = 0; s < S; ++s) {
      double vs = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        double cont = 0.0;
        double b = 0.0;
        if (known_transitions != nullptr) {
          const auto p = known_transitions->transition(h, s, a);
          cont = std::inner_product(p.begin(), p.end(), v_next.begin(), 0.0);
        } else {
          p_hat = empirical_transition(counts, h, s, a);
          cont = std::inner_product(p_hat.begin(), p_hat.end(), v_next.begin(), 0.0);
          b = ucb_bonus(counts, h, s, a, bonus);
        }
        const double q = std::min(reward(h, s, a) + b + cont, cap);
        out.q(h, s, a) = q;
        vs += policy(h, s, a) * q;
      }
      out.v[h][s] = vs;
    }
    v_next = out.v[h];
  }
  return out;
}

}  // namespace offail
