#include "offail/random_instances.hpp"

#include <cmath>
#include <numeric>

namespace offail {

std::vector<double> random_simplex(std::size_t n, Rng& rng) {
  // Normalized exponentials are a flat Dirichlet draw.
  std::vector<double> p(n);
  for (double& x : p) x = -std::log(1.0 - rng.uniform());
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x = x / total;
  for (double& x : p) {
    if (x <= 0.0) x = 1e-12;
  }
  const double renorm = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= renorm;
  return p;
}

TabularMDP random_mdp(Shape shape, Rng& rng) {
  std::vector<double> transitions;
  transitions.reserve(shape.cells() * shape.states);
  for (std::size_t i = 0; i < shape.cells(); ++i) {
    const auto row = random_simplex(shape.states, rng);
    transitions.insert(transitions.end(), row.begin(), row.end());
  }
  auto initial = random_simplex(shape.states, rng);
  StepTable reward(shape);
  for (double& r : reward.flat()) r = 2.0 * rng.uniform() - 1.0;
  return TabularMDP(shape, std::move(transitions), std::move(initial), std::move(reward));
}

Policy random_policy(Shape shape, Rng& rng) {
  StepTable probs(shape);
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    for (std::size_t s = 0; s < shape.states; ++s) {
      const auto row = random_simplex(shape.actions, rng);
      std::copy(row.begin(), row.end(), probs.row(h, s).begin());
    }
  }
  return Policy(std::move(probs));
}

Policy random_deterministic_policy(Shape shape, Rng& rng) {
  StepTable probs(shape);
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    for (std::size_t s = 0; s < shape.states; ++s) {
      probs(h, s, static_cast<std::size_t>(rng.below(shape.actions))) = 1.0;
    }
  }
  return Policy(std::move(probs));
}

}  // namespace offail
