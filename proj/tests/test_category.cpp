#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "snowsim/category.hpp"

using namespace snowsim;

TEST(TransitionParams, Validation) {
  EXPECT_NO_THROW((TransitionParams{0.0, 0.0}.validate()));  // bounds only
  EXPECT_NO_THROW((TransitionParams{1.0, 1.0}.validate()));
  EXPECT_THROW((TransitionParams{1.1, 0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((TransitionParams{0.5, -0.2}.validate()), std::invalid_argument);
}

TEST(StepCategory, AbsorbingBoundaries) {
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    EXPECT_EQ(step_category(Category::Learner, TransitionParams{0.0, 0.5}, rng),
              Category::Learner);
    EXPECT_EQ(step_category(Category::Learner, TransitionParams{1.0, 0.5}, rng),
              Category::Profiteer);
    EXPECT_EQ(step_category(Category::Profiteer, TransitionParams{0.5, 0.0}, rng),
              Category::Profiteer);
    EXPECT_EQ(step_category(Category::Profiteer, TransitionParams{0.5, 1.0}, rng),
              Category::Learner);
  }
}

TEST(StepCategory, FairSwitchFrequency) {
  Rng rng(77);
  const TransitionParams tp{0.5, 0.5};
  int switched = 0;
  const int trials = 100000;
  for (int k = 0; k < trials; ++k) {
    switched += step_category(Category::Learner, tp, rng) == Category::Profiteer;
  }
  const double sigma = std::sqrt(0.25 * trials);
  EXPECT_NEAR(switched, trials / 2.0, 3.0 * sigma);
}

TEST(Stationary, KnownPoints) {
  const StationaryDist sym = stationary(TransitionParams{0.5, 0.5});
  EXPECT_DOUBLE_EQ(sym.pi_learner, 0.5);
  EXPECT_DOUBLE_EQ(sym.pi_profiteer, 0.5);

  const StationaryDist a = stationary(TransitionParams{0.8, 0.5});
  EXPECT_NEAR(a.pi_learner, 5.0 / 13.0, 1e-12);

  const StationaryDist b = stationary(TransitionParams{0.5, 0.8});
  EXPECT_NEAR(b.pi_learner, 8.0 / 13.0, 1e-12);
}

TEST(Stationary, DegenerateChainRejected) {
  EXPECT_THROW(stationary(TransitionParams{0.0, 0.0}), std::domain_error);
}

TEST(Stationary, PureRegimesDegenerateCleanly) {
  const StationaryDist learners_only = stationary(TransitionParams{0.0, 0.7});
  EXPECT_DOUBLE_EQ(learners_only.pi_learner, 1.0);
  const StationaryDist profiteers_only = stationary(TransitionParams{1.0, 0.0});
  EXPECT_DOUBLE_EQ(profiteers_only.pi_learner, 0.0);
}

TEST(Stationary, FixedPointOfTransitionMatrix) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0;
  while (done < 50) {
    const double p = u(gen), q = u(gen);
    if (p + q <= 0.0) continue;
    ++done;
    const StationaryDist pi = stationary(TransitionParams{p, q});
    // row-stochastic matrix B over (Learner, Profiteer)
    const double next_learner = pi.pi_learner * (1.0 - p) + pi.pi_profiteer * q;
    const double next_profiteer = pi.pi_learner * p + pi.pi_profiteer * (1.0 - q);
    EXPECT_NEAR(next_learner, pi.pi_learner, 1e-12);
    EXPECT_NEAR(next_profiteer, pi.pi_profiteer, 1e-12);
    EXPECT_NEAR(pi.pi_learner + pi.pi_profiteer, 1.0, 1e-12);
  }
}

TEST(Stationary, ScaleInvariance) {
  const StationaryDist base = stationary(TransitionParams{0.6, 0.3});
  for (double c : {0.1, 0.5, 1.0}) {
    const StationaryDist scaled = stationary(TransitionParams{0.6 * c, 0.3 * c});
    EXPECT_NEAR(scaled.pi_learner, base.pi_learner, 1e-12);
  }
}

TEST(Stationary, ErgodicOccupationFrequency) {
  for (double p : {0.2, 0.5, 0.8}) {
    for (double q : {0.2, 0.5, 0.8}) {
      Rng rng(static_cast<std::uint64_t>(p * 10) * 100 + static_cast<std::uint64_t>(q * 10));
      const TransitionParams tp{p, q};
      Category c = Category::Learner;
      const int steps = 100000;
      long learner_steps = 0;
      for (int k = 0; k < steps; ++k) {
        c = step_category(c, tp, rng);
        learner_steps += c == Category::Learner;
      }
      const double occ = double(learner_steps) / steps;
      const double pi1 = stationary(tp).pi_learner;
      EXPECT_NEAR(occ, pi1, 0.01 * pi1) << "p=" << p << " q=" << q;
    }
  }
}

TEST(ExpectedCounts, TableValues) {
  const auto [l1, p1] = expected_counts(TransitionParams{0.8, 0.5}, 2500);
  EXPECT_NEAR(l1, 961.538, 1e-3);
  EXPECT_NEAR(p1, 1538.462, 1e-3);

  const auto [l2, p2] = expected_counts(TransitionParams{0.4, 0.4}, 2500);
  EXPECT_DOUBLE_EQ(l2, 1250.0);
  EXPECT_DOUBLE_EQ(p2, 1250.0);

  const auto [l3, p3] = expected_counts(TransitionParams{0.3, 0.6}, 0);
  EXPECT_DOUBLE_EQ(l3, 0.0);
  EXPECT_DOUBLE_EQ(p3, 0.0);
}

TEST(ExpectedCounts, ComponentsSumToNExactly) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int k = 0; k < 100; ++k) {
    const std::uint32_t n = gen() % 10000;
    const auto [learners, profiteers] = expected_counts(TransitionParams{u(gen), u(gen)}, n);
    EXPECT_EQ(learners + profiteers, double(n));
  }
}
