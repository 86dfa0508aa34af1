#pragma once

#include "offail/mdp.hpp"
#include "offail/rng.hpp"

namespace offail {

/// MDP with Dirichlet(1)-like transition rows, initial distribution and
/// uniform [-1, 1] true rewards.
TabularMDP random_mdp(Shape shape, Rng& rng);

/// Policy with strictly positive rows drawn like the transitions above.
Policy random_policy(Shape shape, Rng& rng);

/// Deterministic policy choosing a uniformly random action per (h, s).
Policy random_deterministic_policy(Shape shape, Rng& rng);

/// Random point of the probability simplex of dimension n (entries > 0).
std::vector<double> random_simplex(std::size_t n, Rng& rng);

}  // namespace offail
