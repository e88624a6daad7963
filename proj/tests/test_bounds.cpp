#include "cmablb/bounds.hpp"

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

TEST(DependentBound, LinearUniform) {
  LinearReward r(2);
  const BoundReport b = dependent_bound(r, vec({0.5, 0.5}), 10, 0.01);
  EXPECT_NEAR(b.value, 37.5, 1e-12);
  EXPECT_FALSE(b.degenerate);
  EXPECT_TRUE(b.maximizing_subset.indices().empty());
  EXPECT_DOUBLE_EQ(b.smoothness, 1.0);
}

TEST(DependentBound, LinearUnequal) {
  LinearReward r(2);
  EXPECT_NEAR(dependent_bound(r, vec({0.25, 0.5}), 10, 0.01).value, 25.78125, 1e-12);
}

TEST(DependentBound, ScalesInverselyInGapAndLinearlyInArms) {
  ExpQuadraticReward r(3);
  const Vector mu = vec({0.2, 0.45, 0.7});
  const double base = dependent_bound(r, mu, 20, 0.01).value;
  EXPECT_NEAR(dependent_bound(r, mu, 20, 0.04).value, base / 4.0, 1e-12 * base);
  EXPECT_NEAR(dependent_bound(r, mu, 34, 0.01).value, 2.0 * base, 1e-12 * base);
}

TEST(DependentBound, DegenerateWhenArmsTooFew) {
  LinearReward r(2);
  const BoundReport b = dependent_bound(r, vec({0.5, 0.5}), 4, 0.01);
  EXPECT_TRUE(b.degenerate);
  EXPECT_EQ(b.value, 0.0);
  EXPECT_THROW(dependent_bound(r, vec({0.5, 0.5}), 10, 0.0), std::invalid_argument);
}

TEST(IndependentBound, LinearUniform) {
  LinearReward r(2);
  const BoundReport b = independent_bound(r, vec({0.5, 0.5}), 10, 1e4);
  EXPECT_NEAR(b.value, 6.25, 1e-12);
  EXPECT_THROW(independent_bound(r, vec({0.5, 0.5}), 5, 1e4), std::invalid_argument);
}

TEST(IndependentBound, SquareRootInHorizon) {
  PmcItemReward r(3);
  const Vector mu = vec({0.3, 0.6, 0.1});
  const double a = independent_bound(r, mu, 12, 1e4).value;
  EXPECT_NEAR(independent_bound(r, mu, 12, 4e4).value, 2.0 * a, 1e-12 * a);
}

TEST(Copies, DependentQuadraticIndependentLinear) {
  LinearReward r(2);
  const BoundReport dep = dependent_bound(r, vec({0.5, 0.5}), 10, 0.01);
  const BoundReport ind = independent_bound(r, vec({0.5, 0.5}), 10, 1e4);
  EXPECT_NEAR(sum_copies_bound(dep, 3).value, 9.0 * dep.value, 1e-12);
  EXPECT_NEAR(sum_copies_bound(ind, 3).value, 3.0 * ind.value, 1e-12);
  EXPECT_EQ(sum_copies_bound(dep, 3).copies, 3u);
  EXPECT_EQ(sum_copies_bound(dep, 1).value, dep.value);
  EXPECT_THROW(sum_copies_bound(dep, 0), std::invalid_argument);
}

TEST(Scan, SingleArmMatchesOracle) {
  const ExpQuadraticScan scan = exp_quadratic_scan({1}, interior_grid(9999));
  ASSERT_EQ(scan.rows.size(), 1u);
  EXPECT_NEAR(scan.rows[0].best_value, 0.16826682903834979442, 1e-12);
  EXPECT_NEAR(scan.rows[0].best_p0, 0.6054, 1e-12);
}

TEST(Scan, GridSkipsBoundary) {
  const ExpQuadraticScan scan = exp_quadratic_scan({2}, {0.0, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(scan.rows[0].best_p0, 0.5);
  const std::vector<double> g = interior_grid(3);
  EXPECT_EQ(g, (std::vector<double>{0.25, 0.5, 0.75}));
}

TEST(Parsing, BoundKind) {
  EXPECT_EQ(parse_bound_kind(to_string(BoundKind::independent)), BoundKind::independent);
  EXPECT_THROW(parse_bound_kind("upper"), std::invalid_argument);
}
