#include <gtest/gtest.h>

#include <cmath>

#include "offail/random_instances.hpp"
#include "offail/reward_update.hpp"

namespace offail {
namespace {

std::vector<Trajectory> batch_for(const TabularMDP& mdp, const Policy& pi, std::size_t n,
                                  std::size_t index, std::uint64_t seed) {
  return sample_trajectories(mdp, pi, n, seed, index);
}

TEST(TrajectoryBuffer, WindowOfOneKeepsNewestBatch) {
  Rng rng(1);
  const Shape shape{2, 2, 3};
  const auto mdp = random_mdp(shape, rng);
  auto buf = TrajectoryBuffer::policy_window(shape, 1, 4);
  for (std::size_t k = 0; k < 3; ++k) buf.push(k, batch_for(mdp, Policy::uniform(shape), 4, k, k));
  EXPECT_EQ(buf.policy_indices(), (std::vector<std::size_t>{2}));
  EXPECT_EQ(buf.num_trajectories(), 4u);
}

TEST(TrajectoryBuffer, WindowOfThreeAfterFivePushes) {
  Rng rng(2);
  const Shape shape{2, 2, 3};
  const auto mdp = random_mdp(shape, rng);
  auto buf = TrajectoryBuffer::policy_window(shape, 3, 2);
  for (std::size_t k = 1; k <= 5; ++k) {
    push_policy_data(buf, k, batch_for(mdp, Policy::uniform(shape), 2, k, k));
  }
  EXPECT_EQ(buf.policy_indices(), (std::vector<std::size_t>{3, 4, 5}));
  for (const auto& b : buf.batches()) {
    for (const auto& t : b.trajectories) EXPECT_EQ(t.policy_index, b.policy_index);
  }
}

TEST(TrajectoryBuffer, RejectsBadPushes) {
  Rng rng(3);
  const Shape shape{2, 2, 3};
  const auto mdp = random_mdp(shape, rng);
  auto buf = TrajectoryBuffer::policy_window(shape, 2, 2);
  EXPECT_THROW(buf.push(0, batch_for(mdp, Policy::uniform(shape), 3, 0, 0)), ContractViolation);
  buf.push(4, batch_for(mdp, Policy::uniform(shape), 2, 4, 0));
  EXPECT_THROW(buf.push(4, batch_for(mdp, Policy::uniform(shape), 2, 4, 1)), ContractViolation);
  EXPECT_THROW(buf.push(3, batch_for(mdp, Policy::uniform(shape), 2, 3, 1)), ContractViolation);
  EXPECT_THROW(TrajectoryBuffer::policy_window(shape, 0, 2), ContractViolation);
}

TEST(TrajectoryBuffer, CapacityModeEvictsOldestAndSamplesMinibatch) {
  Rng rng(4);
  const Shape shape{3, 2, 4};
  const auto mdp = random_mdp(shape, rng);
  auto buf = TrajectoryBuffer::with_capacity(shape, 1000, 8, 128);
  for (std::size_t k = 0; k < 20; ++k) buf.push(k, batch_for(mdp, Policy::uniform(shape), 8, k, k));
  EXPECT_TRUE(buf.capacity_mode());
  EXPECT_EQ(buf.num_trajectories(), 128u);
  EXPECT_EQ(buf.policy_indices().front(), 4u);
  Rng draw(9);
  const auto d = minibatch_occupancy(buf, 32, draw);
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    double total = 0.0;
    for (double x : d.table().step(h)) {
      EXPECT_NEAR(x * 32.0, std::round(x * 32.0), 1e-9);
      total += x;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(MixtureOccupancy, ConvergesToExactMixture) {
  Rng rng(5);
  const Shape shape{3, 2, 3};
  const auto mdp = random_mdp(shape, rng);
  const std::vector<Policy> pis{random_policy(shape, rng), random_policy(shape, rng),
                                random_policy(shape, rng)};
  auto buf = TrajectoryBuffer::policy_window(shape, 3, 50'000);
  for (std::size_t k = 0; k < 3; ++k) buf.push(k, batch_for(mdp, pis[k], 50'000, k, 100 + k));
  const std::vector<double> beta{0.5, 0.3, 0.2};  // newest first
  const auto emp = empirical_mixture_occupancy(buf, beta);
  const std::vector<OccupancyMeasure> occ{compute_occupancy(mdp, pis[2]),
                                          compute_occupancy(mdp, pis[1]),
                                          compute_occupancy(mdp, pis[0])};
  const auto exact = mix_occupancies(occ, beta);
  for (std::size_t j = 0; j < exact.table().size(); ++j) {
    EXPECT_NEAR(emp.table().flat()[j], exact.table().flat()[j], 0.01);
  }
  EXPECT_THROW(empirical_mixture_occupancy(TrajectoryBuffer::policy_window(shape, 1, 1)), NoData);
}

TEST(RewardGradient, StepSlicesSumToZero) {
  Rng rng(6);
  const Shape shape{4, 3, 5};
  const auto mdp = random_mdp(shape, rng);
  const auto g = reward_gradient(compute_occupancy(mdp, random_policy(shape, rng)),
                                 compute_occupancy(mdp, random_policy(shape, rng)));
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    double total = 0.0;
    for (double x : g.step(h)) total += x;
    EXPECT_NEAR(total, 0.0, 1e-12);
  }
}

TEST(RewardGradient, MatchesFiniteDifferenceOfLoss) {
  Rng rng(7);
  const Shape shape{3, 2, 3};
  const auto mdp = random_mdp(shape, rng);
  const auto de = compute_occupancy(mdp, random_policy(shape, rng));
  const auto da = compute_occupancy(mdp, random_policy(shape, rng));
  const auto g = reward_gradient(de, da);
  StepTable mu(shape, 0.5);
  const double eps = 1e-6;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    StepTable up = mu, down = mu;
    up.flat()[j] += eps;
    down.flat()[j] -= eps;
    const double fd = (ail_loss(de, da, up) - ail_loss(de, da, down)) / (2 * eps);
    EXPECT_NEAR(fd, g.flat()[j], 1e-8);
  }
}

TEST(ProjectedAscent, ClampsToUnitBox) {
  const Shape shape{1, 3, 1};
  StepTable g(shape);
  g(0, 0, 0) = 10.0;
  g(0, 0, 1) = -10.0;
  g(0, 0, 2) = 0.2;
  const auto next = projected_ascent_step(RewardParams::constant(shape, 0.5), g, 0.5);
  EXPECT_EQ(next(0, 0, 0), 1.0);
  EXPECT_EQ(next(0, 0, 1), 0.0);
  EXPECT_DOUBLE_EQ(next(0, 0, 2), 0.6);
  EXPECT_THROW(RewardParams(StepTable(shape, 1.5)), ContractViolation);
}

TEST(ProjectedAscent, SolvesPerCoordinateProximalProblem) {
  // argmax_{x in [0,1]} g x - (x - m)^2 / (2 eta), located by a fine scan.
  Rng rng(8);
  const Shape shape{2, 2, 2};
  StepTable m(shape), g(shape);
  for (double& x : m.flat()) x = rng.uniform();
  for (double& x : g.flat()) x = 4.0 * rng.uniform() - 2.0;
  const double eta = 0.3;
  const auto next = projected_ascent_step(RewardParams(m), g, eta);
  for (std::size_t j = 0; j < m.size(); ++j) {
    double best_x = 0.0, best = -1e300;
    for (int i = 0; i <= 100'000; ++i) {
      const double x = i / 100'000.0;
      const double val = g.flat()[j] * x - (x - m.flat()[j]) * (x - m.flat()[j]) / (2 * eta);
      if (val > best) {
        best = val;
        best_x = x;
      }
    }
    EXPECT_NEAR(next.table().flat()[j], best_x, 1e-5);
  }
}

TEST(TheoryEta, Presets) {
  EXPECT_NEAR(theory_eta(10'000), 0.01, 1e-15);
  EXPECT_NEAR(theory_eta(45, EtaPreset::kSqrtSAOverK, 9, 5), 1.0, 1e-15);
  EXPECT_NEAR(theory_eta(10'000, EtaPreset::kMinigrid), 0.05, 1e-15);
  EXPECT_THROW(theory_eta(0), InvalidConfig);
  EXPECT_EQ(parse_eta_preset("sqrt-sa-over-k"), EtaPreset::kSqrtSAOverK);
  EXPECT_THROW(parse_eta_preset("bogus"), InvalidConfig);
}

TEST(RewardStepConfig, Validation) {
  EXPECT_THROW((RewardStepConfig{0.0, 1, {}}.validate()), InvalidConfig);
  EXPECT_THROW((RewardStepConfig{0.1, 0, {}}.validate()), InvalidConfig);
  EXPECT_THROW((RewardStepConfig{0.1, 2, {0.5, 0.6}}.validate()), InvalidConfig);
  EXPECT_NO_THROW((RewardStepConfig{0.1, 2, {0.5, 0.5}}.validate()));
}

}  // namespace
}  // namespace offail
