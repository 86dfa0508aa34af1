#include "offail/policy_update.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace offail {

PolicyStepConfig PolicyStepConfig::fixed(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidConfig("policy step size sigma must be > 0, got " + std::to_string(sigma));
  }
  return PolicyStepConfig(sigma);
}

PolicyStepConfig PolicyStepConfig::theory(std::size_t actions, std::size_t horizon,
                                          std::size_t iters) {
  return fixed(theory_sigma(static_cast<double>(actions), horizon, iters));
}

double theory_sigma(double actions, std::size_t horizon, std::size_t iters) {
  if (!(actions >= 2.0)) throw InvalidConfig("theory sigma needs A >= 2");
  if (horizon < 1 || iters < 1) throw InvalidConfig("theory sigma needs H >= 1 and K >= 1");
  const double h = static_cast<double>(horizon);
  return std::sqrt(2.0 * std::log(actions) / (h * h * static_cast<double>(iters)));
}

Policy mirror_descent_step(const Policy& policy, const StepTable& q, double sigma) {
  require_shape(policy.shape(), q.shape(), "mirror_descent_step");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ContractViolation("mirror_descent_step: sigma must be finite and >= 0");
  }
  for (double x : q.flat()) {
    if (!std::isfinite(x)) throw ContractViolation("mirror_descent_step: non-finite Q entry");
  }
  if (sigma == 0.0) return policy;

  const Shape& sh = policy.shape();
  StepTable next(sh);
  std::vector<double> logits(sh.actions);
  for (std::size_t h = 0; h < sh.horizon; ++h) {
    for (std::size_t s = 0; s < sh.states; ++s) {
      const auto prev = policy.row(h, s);
      const auto qrow = q.row(h, s);
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < sh.actions; ++a) {
        logits[a] = prev[a] > 0.0 ? std::log(prev[a]) + sigma * qrow[a]
                                  : -std::numeric_limits<double>::infinity();
        top = std::max(top, logits[a]);
      }
      auto out = next.row(h, s);
      double z = 0.0;
      for (std::size_t a = 0; a < sh.actions; ++a) {
        out[a] = prev[a] > 0.0 ? std::exp(logits[a] - top) : 0.0;
        z += out[a];
      }
      for (std::size_t a = 0; a < sh.actions; ++a) out[a] /= z;
    }
  }
  return Policy(std::move(next));
}

Policy mirror_descent_step(const Policy& policy, const OptimisticQ& q,
                           const PolicyStepConfig& config) {
  return mirror_descent_step(policy, q.q, config.sigma());
}

}  // namespace offail
