#include "offail/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "offail/policy_update.hpp"

namespace offail {

namespace {

void require_simplex(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double x : p) {
    if (x < -1e-12) throw ContractViolation(std::string(what) + ": negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw ContractViolation(std::string(what) + ": not normalized (sum " + std::to_string(sum) +
                            ")");
  }
}

}  // namespace

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ContractViolation("tv_distance: size mismatch");
  require_simplex(p, "tv_distance");
  require_simplex(q, "tv_distance");
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - q[i]);
  return 0.5 * l1;
}

OccupancyShiftReport check_occupancy_shift(const TabularMDP& mdp, const Policy& pi,
                                           const Policy& pi_other, double tol) {
  require_shape(mdp.shape(), pi.shape(), "check_occupancy_shift");
  require_shape(mdp.shape(), pi_other.shape(), "check_occupancy_shift");
  const auto d = compute_occupancy(mdp, pi);
  const auto d_other = compute_occupancy(mdp, pi_other);
  const auto nu = state_visitation(mdp, pi);

  OccupancyShiftReport report;
  double running = 0.0;
  for (std::size_t h = 0; h < mdp.horizon(); ++h) {
    double expected_tv = 0.0;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
      if (nu[h][s] == 0.0) continue;
      expected_tv += nu[h][s] * tv_distance(pi.row(h, s), pi_other.row(h, s));
    }
    running += 2.0 * expected_tv;

    const auto a = d.table().step(h);
    const auto b = d_other.table().step(h);
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);

    report.lhs.push_back(l1);
    report.rhs.push_back(running);
    if (l1 > running + tol) report.pass = false;
  }
  return report;
}

PolicyStepReport check_policy_step(const Policy& prev, const Policy& next, double sigma,
                                   std::size_t actions, std::size_t horizon) {
  require_shape(prev.shape(), next.shape(), "check_policy_step");
  PolicyStepReport report;
  report.bound = tv_step_bound(actions, horizon, sigma);
  const Shape& sh = prev.shape();
  for (std::size_t h = 0; h < sh.horizon; ++h) {
    for (std::size_t s = 0; s < sh.states; ++s) {
      report.max_tv = std::max(report.max_tv, tv_distance(prev.row(h, s), next.row(h, s)));
    }
  }
  report.pass = report.max_tv <= report.bound;
  return report;
}

double policy_regret_term(const TabularMDP& mdp, std::span<const RewardParams> rewards,
                          std::span<const Policy> policies) {
  if (rewards.size() != policies.size()) {
    throw ContractViolation("policy_regret_term: histories differ in length");
  }
  if (rewards.empty()) return 0.0;
  StepTable total(mdp.shape());
  double achieved = 0.0;
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    require_shape(mdp.shape(), rewards[k].shape(), "policy_regret_term");
    const auto src = rewards[k].table().flat();
    auto dst = total.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    achieved += policy_value(mdp, policies[k], rewards[k].table());
  }
  return optimal_value(mdp, total) - achieved;
}

double box_supremum(const StepTable& cumulative_gap) {
  double sup = 0.0;
  for (double g : cumulative_gap.flat()) sup += std::max(0.0, g);
  return sup;
}

double ail_regret(const OccupancyMeasure& expert, std::span<const OccupancyMeasure> occupancies) {
  StepTable gap(expert.shape());
  for (const OccupancyMeasure& d : occupancies) {
    require_shape(expert.shape(), d.shape(), "ail_regret");
    const auto e = expert.table().flat();
    const auto a = d.table().flat();
    auto g = gap.flat();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += e[i] - a[i];
  }
  return box_supremum(gap);
}

double reward_regret_term(const OccupancyMeasure& expert,
                          std::span<const OccupancyMeasure> occupancies,
                          std::span<const RewardParams> rewards) {
  if (rewards.size() != occupancies.size()) {
    throw ContractViolation("reward_regret_term: histories differ in length");
  }
  double achieved = 0.0;
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    achieved += policy_value(expert, rewards[k].table()) -
                policy_value(occupancies[k], rewards[k].table());
  }
  return ail_regret(expert, occupancies) - achieved;
}

RegretLedger::RegretLedger(TabularMDP mdp, Policy expert)
    : mdp_(std::move(mdp)),
      expert_occ_(compute_occupancy(mdp_, expert)),
      expert_true_return_(policy_value(expert_occ_, mdp_.true_reward())),
      gap_sum_(mdp_.shape()),
      reward_sum_(mdp_.shape()) {}

const RegretRecord& RegretLedger::record(const Policy& policy, const RewardParams& mu) {
  const OccupancyMeasure d = compute_occupancy(mdp_, policy);
  const double agent_value = policy_value(d, mu.table());
  const double loss = policy_value(expert_occ_, mu.table()) - agent_value;

  const auto e = expert_occ_.table().flat();
  const auto a = d.table().flat();
  const auto m = mu.table().flat();
  auto g = gap_sum_.flat();
  auto r = reward_sum_.flat();
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] += e[i] - a[i];
    r[i] += m[i];
  }
  agent_value_sum_ += agent_value;
  loss_sum_ += loss;

  RegretRecord rec;
  rec.iter = records_.size() + 1;
  rec.agent_true_return = policy_value(d, mdp_.true_reward());
  rec.expert_true_return = expert_true_return_;
  rec.loss = loss;
  rec.policy_regret = optimal_value(mdp_, reward_sum_) - agent_value_sum_;
  rec.ail_regret = box_supremum(gap_sum_);
  rec.reward_regret = rec.ail_regret - loss_sum_;
  rec.bound = rec.policy_regret + rec.reward_regret;
  records_.push_back(rec);
  return records_.back();
}

MixtureReport check_mixture_policy(const TabularMDP& mdp, std::span<const Policy> policies,
                                   std::span<const double> weights, double tol) {
  if (policies.size() != weights.size()) {
    throw ContractViolation("check_mixture_policy: weight count differs from policy count");
  }
  std::vector<OccupancyMeasure> occs;
  occs.reserve(policies.size());
  for (const Policy& p : policies) occs.push_back(compute_occupancy(mdp, p));
  const OccupancyMeasure mix = mix_occupancies(occs, weights);

  MixtureReport report{occupancy_to_policy(mdp, mix), 0.0, true};
  const OccupancyMeasure again = compute_occupancy(mdp, report.recovered);
  const auto x = mix.table().flat();
  const auto y = again.table().flat();
  for (std::size_t i = 0; i < x.size(); ++i) {
    report.max_abs_error = std::max(report.max_abs_error, std::abs(x[i] - y[i]));
  }
  report.pass = report.max_abs_error <= tol;
  return report;
}

}  // namespace offail
