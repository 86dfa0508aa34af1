#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "offail/oracles.hpp"
#include "offail/policy_update.hpp"
#include "offail/random_instances.hpp"
#include "support/brute_force.hpp"

namespace offail {
namespace {

StepTable random_q(const Shape& shape, Rng& rng, double scale) {
  StepTable q(shape);
  for (double& x : q.flat()) x = scale * rng.uniform();
  return q;
}

TEST(MirrorDescent, ZeroStepIsIdentity) {
  Rng rng(1);
  const Shape shape{3, 4, 2};
  const auto pi = random_policy(shape, rng);
  EXPECT_EQ(mirror_descent_step(pi, random_q(shape, rng, 2.0), 0.0), pi);
}

TEST(MirrorDescent, TwoActionClosedForm) {
  const Shape shape{1, 2, 1};
  StepTable q(shape);
  q(0, 0, 0) = 1.0;
  const auto next = mirror_descent_step(Policy::uniform(shape), q, 1.0);
  const double e = std::numbers::e;
  EXPECT_NEAR(next(0, 0, 0), e / (e + 1.0), 1e-15);
  EXPECT_NEAR(next(0, 0, 1), 1.0 / (e + 1.0), 1e-15);
}

TEST(MirrorDescent, MatchesKlRegularizedGridSearch) {
  Rng rng(77);
  for (int trial = 0; trial < 6; ++trial) {
    const Shape shape{1, 2 + rng.below(3), 1};
    const auto pi = random_policy(shape, rng);
    const auto q = random_q(shape, rng, 3.0);
    const double sigma = 0.2 + rng.uniform();
    const auto next = mirror_descent_step(pi, q, sigma);
    const auto ref = testing::grid_search_kl_step(pi.table().row(0, 0), q.row(0, 0), sigma, 1e-3);
    for (std::size_t a = 0; a < shape.actions; ++a) EXPECT_NEAR(next(0, 0, a), ref[a], 2e-3);
  }
}

TEST(MirrorDescent, RatioPositivityAndMonotoneTilt) {
  Rng rng(5);
  const Shape shape{4, 5, 3};
  const auto pi = random_policy(shape, rng);
  const auto q = random_q(shape, rng, 3.0);
  const double sigma = 0.4;
  const auto next = mirror_descent_step(pi, q, sigma);
  for (std::size_t h = 0; h < 3; ++h) {
    for (std::size_t s = 0; s < 4; ++s) {
      for (std::size_t a = 0; a < 5; ++a) {
        EXPECT_GT(next(h, s, a), 0.0);
        for (std::size_t b = 0; b < 5; ++b) {
          const double lhs = std::log(next(h, s, a) / next(h, s, b));
          const double rhs = std::log(pi(h, s, a) / pi(h, s, b)) + sigma * (q(h, s, a) - q(h, s, b));
          EXPECT_NEAR(lhs, rhs, 1e-9);
          if (q(h, s, a) > q(h, s, b)) {
            EXPECT_GT(next(h, s, a) / next(h, s, b), pi(h, s, a) / pi(h, s, b));
          }
        }
      }
    }
  }
}

TEST(MirrorDescent, ZeroProbabilityActionsStayZero) {
  const Shape shape{1, 3, 1};
  StepTable t(shape);
  t(0, 0, 0) = 0.5;
  t(0, 0, 2) = 0.5;
  StepTable q(shape);
  q(0, 0, 1) = 100.0;
  const auto next = mirror_descent_step(Policy(t), q, 1.0);
  EXPECT_EQ(next(0, 0, 1), 0.0);
  EXPECT_NEAR(next(0, 0, 0), 0.5, 1e-15);
}

TEST(MirrorDescent, LargeQIsStable) {
  const Shape shape{1, 2, 1};
  StepTable q(shape);
  q(0, 0, 0) = 1e4;
  const auto next = mirror_descent_step(Policy::uniform(shape), q, 1.0);
  EXPECT_NEAR(next(0, 0, 0), 1.0, 1e-15);
  q(0, 0, 1) = std::nan("");
  EXPECT_THROW(mirror_descent_step(Policy::uniform(shape), q, 1.0), ContractViolation);
}

TEST(TheorySigma, ClosedFormValues) {
  EXPECT_NEAR(theory_sigma(5.0, 9, 1000), std::sqrt(2.0 * std::log(5.0) / (81.0 * 1000.0)), 1e-15);
  // log(e^2) = 2, so sigma = sqrt(4 / 4) = 1.
  EXPECT_NEAR(theory_sigma(std::exp(2.0), 1, 4), 1.0, 1e-12);
  EXPECT_THROW(theory_sigma(1.0, 3, 10), InvalidConfig);
  EXPECT_THROW(theory_sigma(5.0, 3, 0), InvalidConfig);
  EXPECT_THROW(PolicyStepConfig::fixed(0.0), InvalidConfig);
}

TEST(PolicyStepBound, HoldsForTheorySigmaAndFullRangeQ) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const Shape shape{2 + rng.below(4), 2 + rng.below(4), 1 + rng.below(8)};
    const double sigma = theory_sigma(static_cast<double>(shape.actions), shape.horizon,
                                      1 + rng.below(5000));
    const auto pi = random_policy(shape, rng);
    const auto q = random_q(shape, rng, static_cast<double>(shape.horizon));
    const auto r = check_policy_step(pi, mirror_descent_step(pi, q, sigma), sigma, shape.actions,
                                     shape.horizon);
    EXPECT_TRUE(r.pass) << r.max_tv << " > " << r.bound;
  }
}

}  // namespace
}  // namespace offail
