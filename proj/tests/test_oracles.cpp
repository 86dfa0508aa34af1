#include <gtest/gtest.h>

#include <cmath>

#include "offail/gridworld.hpp"
#include "offail/oracles.hpp"
#include "offail/random_instances.hpp"
#include "support/brute_force.hpp"

namespace offail {
namespace {

RewardParams random_reward(const Shape& shape, Rng& rng) {
  StepTable m(shape);
  for (double& x : m.flat()) x = rng.uniform();
  return RewardParams(m);
}

TEST(TvDistance, Examples) {
  const std::vector<double> p{1.0, 0.0}, q{0.0, 1.0}, u{0.5, 0.5};
  EXPECT_EQ(tv_distance(p, q), 1.0);
  EXPECT_EQ(tv_distance(p, p), 0.0);
  EXPECT_DOUBLE_EQ(tv_distance(p, u), 0.5);
  const std::vector<double> bad{0.7, 0.7};
  EXPECT_THROW(tv_distance(bad, u), ContractViolation);
}

TEST(OccupancyShift, SingleStateIsTightAtEachStep) {
  // One state: d_h is the action distribution itself.
  Rng rng(2);
  const Shape shape{1, 4, 5};
  const TabularMDP mdp(shape, std::vector<double>(shape.cells(), 1.0), {1.0}, StepTable(shape));
  const auto pi = random_policy(shape, rng), other = random_policy(shape, rng);
  const auto r = check_occupancy_shift(mdp, pi, other);
  EXPECT_TRUE(r.pass);
  double prefix = 0.0;
  for (std::size_t h = 0; h < 5; ++h) {
    const double tv = tv_distance(pi.table().row(h, 0), other.table().row(h, 0));
    prefix += tv;
    EXPECT_NEAR(r.lhs[h], 2.0 * tv, 1e-12);
    EXPECT_NEAR(r.rhs[h], 2.0 * prefix, 1e-12);
  }
}

TEST(OccupancyShift, HoldsOnRandomPairs) {
  Rng rng(3);
  for (std::size_t side : {3u, 5u}) {
    const auto mdp = build_empty_room({side});
    for (int i = 0; i < 20; ++i) {
      EXPECT_TRUE(check_occupancy_shift(mdp, random_policy(mdp.shape(), rng),
                                        random_policy(mdp.shape(), rng))
                      .pass);
    }
  }
}

TEST(PolicyRegretTerm, MatchesDeterministicEnumeration) {
  Rng rng(4);
  for (const Shape& shape : testing::small_shape_corpus()) {
    const auto mdp = random_mdp(shape, rng);
    std::vector<RewardParams> rewards;
    std::vector<Policy> policies;
    StepTable sum(shape);
    double played = 0.0;
    for (int k = 0; k < 4; ++k) {
      rewards.push_back(random_reward(shape, rng));
      policies.push_back(random_policy(shape, rng));
      for (std::size_t j = 0; j < sum.size(); ++j) sum.flat()[j] += rewards.back().table().flat()[j];
      played += testing::enumerate_value(mdp, policies.back(), rewards.back().table());
    }
    const double ref = testing::enumerate_best_deterministic_value(mdp, sum) - played;
    EXPECT_NEAR(policy_regret_term(mdp, rewards, policies), ref, 1e-12) << to_string(shape);
  }
}

TEST(RewardRegretTerm, MatchesGridSearch) {
  Rng rng(5);
  for (const Shape& shape : testing::small_shape_corpus()) {
    const auto mdp = random_mdp(shape, rng);
    const OccupancyMeasure expert(testing::enumerate_occupancy(mdp, random_policy(shape, rng)));
    std::vector<OccupancyMeasure> occ;
    std::vector<RewardParams> rewards;
    StepTable gap(shape);
    double played = 0.0;
    for (int k = 0; k < 3; ++k) {
      occ.emplace_back(testing::enumerate_occupancy(mdp, random_policy(shape, rng)));
      rewards.push_back(random_reward(shape, rng));
      for (std::size_t j = 0; j < gap.size(); ++j) {
        const double g = expert.table().flat()[j] - occ.back().table().flat()[j];
        gap.flat()[j] += g;
        played += g * rewards.back().table().flat()[j];
      }
    }
    const double grid = testing::grid_search_box_max(gap, 0.25);
    EXPECT_NEAR(reward_regret_term(expert, occ, rewards), grid - played, 1e-12) << to_string(shape);
    EXPECT_NEAR(ail_regret(expert, occ), grid, 1e-12);
    EXPECT_GE(ail_regret(expert, occ), 0.0);
  }
}

TEST(BoxSupremum, PositivePartSum) {
  StepTable gap(Shape{1, 3, 1});
  gap(0, 0, 0) = 0.4;
  gap(0, 0, 1) = -0.9;
  gap(0, 0, 2) = 0.1;
  EXPECT_DOUBLE_EQ(box_supremum(gap), 0.5);
}

TEST(RegretLedger, DecompositionBoundsAilRegret) {
  Rng rng(6);
  const EmptyRoomSpec room{3};
  const auto mdp = build_empty_room(room);
  RegretLedger ledger(mdp, build_expert(room));
  std::vector<Policy> pis;
  std::vector<RewardParams> mus;
  std::vector<OccupancyMeasure> occ;
  for (std::size_t k = 1; k <= 25; ++k) {
    pis.push_back(random_policy(mdp.shape(), rng));
    mus.push_back(random_reward(mdp.shape(), rng));
    occ.push_back(compute_occupancy(mdp, pis.back()));
    const auto& r = ledger.record(pis.back(), mus.back());
    EXPECT_EQ(r.iter, k);
    EXPECT_NEAR(r.expert_true_return, 4.6, 1e-12);
    EXPECT_GE(r.ail_regret, 0.0);
    EXPECT_LE(r.ail_regret, r.bound + 1e-9);
    EXPECT_NEAR(r.bound, r.policy_regret + r.reward_regret, 1e-12);
    EXPECT_NEAR(r.policy_regret, policy_regret_term(mdp, mus, pis), 1e-9);
    EXPECT_NEAR(r.reward_regret, reward_regret_term(ledger.expert_occupancy(), occ, mus), 1e-9);
    EXPECT_NEAR(r.ail_regret, ail_regret(ledger.expert_occupancy(), occ), 1e-9);
  }
}

TEST(RegretLedger, PolicyTermCanBeNegativeWhileBoundHolds) {
  // One state, two actions, one step; the agent best-responds to each reward.
  const Shape shape{1, 2, 1};
  const TabularMDP mdp(shape, {1.0, 1.0}, {1.0}, StepTable(shape));
  StepTable a0(shape), a1(shape);
  a0(0, 0, 0) = 1.0;
  a1(0, 0, 1) = 1.0;
  RegretLedger ledger(mdp, Policy(a0));
  ledger.record(Policy(a0), RewardParams(a0));
  const auto& r = ledger.record(Policy(a1), RewardParams(a1));
  EXPECT_DOUBLE_EQ(r.policy_regret, -1.0);
  EXPECT_DOUBLE_EQ(r.reward_regret, 2.0);
  EXPECT_DOUBLE_EQ(r.ail_regret, 1.0);
  EXPECT_LE(r.ail_regret, r.bound);
}

TEST(MixturePolicy, RecoversRandomMixtures) {
  Rng rng(7);
  const auto mdp = random_mdp(Shape{4, 3, 5}, rng);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 2 + rng.below(9);
    std::vector<Policy> pis;
    for (std::size_t j = 0; j < n; ++j) pis.push_back(random_deterministic_policy(mdp.shape(), rng));
    const auto r = check_mixture_policy(mdp, pis, random_simplex(n, rng));
    EXPECT_TRUE(r.pass) << r.max_abs_error;
  }
}

}  // namespace
}  // namespace offail
