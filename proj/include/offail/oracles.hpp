#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "offail/mdp.hpp"
#include "offail/reward_params.hpp"

namespace offail {

// Exact theoretical quantities. Everything here works from exact occupancies
// of the true model; nothing is estimated from samples.

/// Half the L1 distance. Throws ContractViolation if either input is off the
/// simplex by more than 1e-6.
double tv_distance(std::span<const double> p, std::span<const double> q);

/// Occupancy shift versus per-step policy change:
///   ||d^pi_h - d^pi'_h||_1  <=  2 sum_{i<=h} E_{s~nu^pi_i} TV(pi_i(.|s), pi'_i(.|s)).
struct OccupancyShiftReport {
  std::vector<double> lhs;  ///< per step
  std::vector<double> rhs;  ///< per step
  bool pass = true;
};

OccupancyShiftReport check_occupancy_shift(const TabularMDP& mdp, const Policy& pi,
                                           const Policy& pi_other, double tol = 1e-9);

/// Largest per-state TV between consecutive mirror-descent iterates against
/// the bound A * H * sigma.
struct PolicyStepReport {
  double max_tv = 0.0;
  double bound = 0.0;
  bool pass = true;

  double slack() const { return bound - max_tv; }
};

PolicyStepReport check_policy_step(const Policy& prev, const Policy& next, double sigma,
                                   std::size_t actions, std::size_t horizon);

/**
 * sup_pi sum_k J(pi, mu^k) - sum_k J(pi^k, mu^k).
 *
 * J is linear in the reward, so the supremum over policies of the sum equals
 * max_pi J(pi, sum_k mu^k), i.e. K times the optimal value under the averaged
 * reward, which one backward DP on the true model computes.
 */
double policy_regret_term(const TabularMDP& mdp, std::span<const RewardParams> rewards,
                          std::span<const Policy> policies);

/**
 * sup_{mu in [0,1]} sum_k L(pi^k, mu) - sum_k L(pi^k, mu^k).
 *
 * The objective is linear and the box is a product of intervals, so the
 * supremum is sum over (h,s,a) of max(0, sum_k (d^E - d^k)(h,s,a)).
 */
double reward_regret_term(const OccupancyMeasure& expert,
                          std::span<const OccupancyMeasure> occupancies,
                          std::span<const RewardParams> rewards);

/// sup_mu sum_k L(pi^k, mu), by the same closed form.
double ail_regret(const OccupancyMeasure& expert, std::span<const OccupancyMeasure> occupancies);

/// Positive-part sum of a cumulative gap table; the box supremum of <gap, mu>.
double box_supremum(const StepTable& cumulative_gap);

struct RegretRecord {
  std::size_t iter = 0;
  double agent_true_return = 0.0;   ///< J(pi^k, r)
  double expert_true_return = 0.0;  ///< J(pi^E, r)
  double loss = 0.0;                ///< L(pi^k, mu^k)
  double policy_regret = 0.0;       ///< cumulative policy-update term
  double reward_regret = 0.0;       ///< cumulative reward-update term
  double ail_regret = 0.0;          ///< exact sup_mu sum_k L(pi^k, mu)
  double bound = 0.0;               ///< policy_regret + reward_regret
};

/// Incremental regret bookkeeping over a run: one record per (pi^k, mu^k) pair.
class RegretLedger {
 public:
  RegretLedger(TabularMDP mdp, Policy expert);

  const RegretRecord& record(const Policy& policy, const RewardParams& mu);

  const std::vector<RegretRecord>& records() const { return records_; }
  const OccupancyMeasure& expert_occupancy() const { return expert_occ_; }

 private:
  TabularMDP mdp_;
  OccupancyMeasure expert_occ_;
  double expert_true_return_;
  StepTable gap_sum_;     ///< sum_k (d^E - d^k)
  StepTable reward_sum_;  ///< sum_k mu^k
  double agent_value_sum_ = 0.0;  ///< sum_k J(pi^k, mu^k)
  double loss_sum_ = 0.0;         ///< sum_k L(pi^k, mu^k)
  std::vector<RegretRecord> records_;
};

/// A mixture of occupancies realized as a single policy's occupancy.
struct MixtureReport {
  Policy recovered;
  double max_abs_error = 0.0;
  bool pass = true;
};

MixtureReport check_mixture_policy(const TabularMDP& mdp, std::span<const Policy> policies,
                                   std::span<const double> weights, double tol = 1e-9);

}  // namespace offail
