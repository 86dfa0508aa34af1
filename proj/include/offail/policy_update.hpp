#pragma once

#include <cstddef>

#include "offail/estimation.hpp"
#include "offail/mdp.hpp"

namespace offail {

/// Mirror-descent step size. Construct via the factories so sigma > 0 holds.
class PolicyStepConfig {
 public:
  /// Throws InvalidConfig unless sigma is finite and positive.
  static PolicyStepConfig fixed(double sigma);
  /// sqrt(2 log A / (H^2 K)).
  static PolicyStepConfig theory(std::size_t actions, std::size_t horizon, std::size_t iters);

  double sigma() const { return sigma_; }

 private:
  explicit PolicyStepConfig(double sigma) : sigma_(sigma) {}
  double sigma_;
};

/// sqrt(2 log A / (H^2 K)); A < 2 is rejected since log A would be <= 0.
double theory_sigma(double actions, std::size_t horizon, std::size_t iters);

/// Largest tilt the sigma-scaled Q range can impose in one step: the per-state
/// TV between consecutive iterates never exceeds A * H * sigma.
inline double tv_step_bound(std::size_t actions, std::size_t horizon, double sigma) {
  return static_cast<double>(actions) * static_cast<double>(horizon) * sigma;
}

/**
 * KL-regularized mirror ascent:
 *   pi_new_h(.|s) proportional to pi_h(.|s) * exp(sigma * Q_h(s,.)).
 *
 * Evaluated in log space with the row maximum subtracted, so long runs of
 * updates neither overflow nor flush supported actions to zero. Actions with
 * zero probability stay at zero. sigma = 0 returns the input unchanged.
 */
Policy mirror_descent_step(const Policy& policy, const StepTable& q, double sigma);
Policy mirror_descent_step(const Policy& policy, const OptimisticQ& q,
                           const PolicyStepConfig& config);

}  // namespace offail
