#include "cmablb/rewards.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

using namespace cmablb;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST(Rewards, LinearZeroAndGradient) {
  LinearReward r(3);
  EXPECT_EQ(r.evaluate(Vector::Zero(3)), 0.0);
  EXPECT_EQ(r.gradient(vec({0.2, 0.9, 0.4})), Vector::Ones(3));
}

TEST(Rewards, PmcAbsorbingCoordinate) {
  PmcItemReward r(3);
  EXPECT_EQ(r.evaluate(vec({1.0, 0.3, 0.7})), 1.0);
  const Vector g = PmcItemReward(2).gradient(vec({0.3, 0.4}));
  EXPECT_NEAR(g[0], 0.6, 1e-15);
  EXPECT_NEAR(g[1], 0.7, 1e-15);
}

TEST(Rewards, ExpQuadraticReference) {
  ExpQuadraticReward r(2);
  EXPECT_NEAR(r.evaluate(vec({0.5, 0.5})), 0.3934693402873665764, 1e-15);
  const Vector g = r.gradient(vec({0.5, 0.5}));
  EXPECT_NEAR(g[0], 0.6065306597126334236, 1e-15);
  EXPECT_NEAR(g[1], 0.6065306597126334236, 1e-15);
}

TEST(Rewards, PowerGradientWeights) {
  PowerGradientReward r(4);
  EXPECT_FALSE(r.index_invariant());
  const Vector g = r.gradient(vec({0.1, 0.2, 0.3, 0.4}));
  EXPECT_EQ(g, vec({8, 4, 2, 1}));
}

TEST(Rewards, RejectsBadInput) {
  LinearReward r(2);
  EXPECT_THROW(r.evaluate(vec({0.5})), std::invalid_argument);
  EXPECT_THROW(r.evaluate(vec({0.5, 1.5})), std::invalid_argument);
  EXPECT_THROW(r.evaluate(vec({-0.1, 0.5})), std::invalid_argument);
  EXPECT_THROW(r.gradient(vec({NAN, 0.5})), std::invalid_argument);
}

TEST(Rewards, FiniteDifferenceMatchesAnalytic) {
  EXPECT_LE((finite_diff_gradient(LinearReward(2), vec({0.5, 0.5})) - Vector::Ones(2)).lpNorm<Eigen::Infinity>(),
            1e-8);
  EXPECT_LE((finite_diff_gradient(PmcItemReward(2), vec({0.3, 0.4})) - vec({0.6, 0.7})).lpNorm<Eigen::Infinity>(),
            1e-6);
  ExpQuadraticReward eq(2);
  EXPECT_LE((finite_diff_gradient(eq, vec({0.5, 0.5})) - eq.gradient(vec({0.5, 0.5}))).lpNorm<Eigen::Infinity>(),
            1e-6);
}

TEST(Rewards, FiniteDifferenceAtBoundary) {
  ExpQuadraticReward eq(3);
  const Vector mu = vec({0.0, 1.0, 0.5});
  EXPECT_LE((finite_diff_gradient(eq, mu) - eq.gradient(mu)).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Rewards, SumOfCopiesStacksBlocks) {
  auto base = std::make_shared<PmcItemReward>(2);
  SumOfCopies r(base, 3);
  EXPECT_EQ(r.action_size(), 6u);
  EXPECT_FALSE(r.index_invariant());
  const Vector mu = vec({0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  const double expected = base->evaluate(vec({0.1, 0.2})) + base->evaluate(vec({0.3, 0.4})) +
                          base->evaluate(vec({0.5, 0.6}));
  EXPECT_NEAR(r.evaluate(mu), expected, 1e-15);
  const Vector g = r.gradient(mu);
  EXPECT_NEAR(g[2], 0.6, 1e-15);
  EXPECT_NEAR(g[3], 0.7, 1e-15);
}

TEST(Rewards, Factory) {
  for (const std::string& name : reward_names()) {
    EXPECT_EQ(make_reward(name, 3)->name(), name);
    EXPECT_EQ(make_reward(name, 3, 2)->action_size(), 6u);
  }
  EXPECT_THROW(make_reward("cascade", 3), std::invalid_argument);
  EXPECT_THROW(make_reward("linear", 0), std::invalid_argument);
}
