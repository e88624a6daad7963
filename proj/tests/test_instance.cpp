#include "cmablb/instance.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
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

TEST(Coupling, OutcomesAndObservations) {
  CouplingDistribution d(vec({0.25, 0.5}));
  const Vector probs = d.outcome_probabilities();
  EXPECT_EQ(probs, vec({0.25, 0.25, 0.5}));
  EXPECT_EQ(d.observe(0.1), (std::vector<std::uint8_t>{1, 1}));
  EXPECT_EQ(d.observe(0.4), (std::vector<std::uint8_t>{0, 1}));
  EXPECT_EQ(d.observe(0.9), (std::vector<std::uint8_t>{0, 0}));
  EXPECT_THROW(CouplingDistribution(vec({0.5, 0.25})), std::invalid_argument);
  EXPECT_THROW(CouplingDistribution(vec({0.5, 1.5})), std::invalid_argument);
}

TEST(Bkl, WorkedExample) {
  const Vector p = vec({0.25, 0.5});
  Matrix b(2, 2);
  b << 6, 2, 2, 6;
  EXPECT_LE((bkl_build(p) - b).lpNorm<Eigen::Infinity>(), 1e-15);
  Matrix inv(2, 2);
  inv << 6, -2, -2, 6;
  inv /= 32.0;
  EXPECT_LE((bkl_inverse(p) - inv).lpNorm<Eigen::Infinity>(), 1e-15);
  EXPECT_LE((bkl_build(p) * bkl_inverse(p) - Matrix::Identity(2, 2)).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Bkl, ScalarCase) {
  const Vector p = vec({0.3});
  EXPECT_NEAR(bkl_build(p)(0, 0), 1.0 / (0.3 * 0.7), 1e-12);
  EXPECT_NEAR(bkl_inverse(p)(0, 0), 0.21, 1e-15);
}

TEST(Bkl, RejectsDegenerateThresholds) {
  EXPECT_THROW(bkl_build(vec({0.0, 0.5})), std::invalid_argument);
  EXPECT_THROW(bkl_build(vec({0.5, 0.5})), std::invalid_argument);
  EXPECT_THROW(bkl_build(vec({0.5, 1.0})), std::invalid_argument);
  EXPECT_THROW(validity_bound(vec({0.6, 0.3})), std::invalid_argument);
}

TEST(EpsilonStar, ClosedFormAndMatrixRoute) {
  const Vector p = vec({0.25, 0.5});
  const Vector c = cumulative_gradient(Vector::Ones(2));
  EXPECT_EQ(c, vec({2, 1}));
  const Vector closed = epsilon_star(p, c, 1.0);
  EXPECT_NEAR(closed[0], 0.3125, 1e-15);
  EXPECT_NEAR(closed[1], 0.0625, 1e-15);
  EXPECT_LE((closed - epsilon_star_matrix_route(p, c, 1.0)).lpNorm<Eigen::Infinity>(), 1e-15);
  EXPECT_EQ(epsilon_star(p, c, 0.0), Vector::Zero(2));
  EXPECT_NEAR(f_ratio(p, c, closed), 0.6875, 1e-15);
  EXPECT_THROW(epsilon_star(p, Vector::Zero(2), 1.0), std::invalid_argument);
}

TEST(EpsilonStar, OrthogonalDirectionGivesZeroRatio) {
  const Vector p = vec({0.25, 0.5});
  const Vector c = vec({2, 1});
  EXPECT_EQ(f_ratio(p, c, vec({1, -2})), 0.0);
  EXPECT_THROW(f_ratio(p, c, Vector::Zero(2)), std::invalid_argument);
}

TEST(Validity, PlugIn) {
  EXPECT_DOUBLE_EQ(validity_bound(vec({0.25, 0.5})), 0.125);
  EXPECT_DOUBLE_EQ(validity_bound(vec({0.5})), 0.25);
  EXPECT_LT(validity_bound(vec({1e-9, 0.5})), 1e-9);
}

TEST(Kl, WorkedExampleAgainstOracle) {
  const Vector p = vec({0.25, 0.5});
  const KlComparison kl = kl_compare(p, vec({0.01, 0.01}));
  EXPECT_NEAR(kl.exact, 0.00080021346998381187379, 1e-16);
  EXPECT_NEAR(kl.quadratic_bound, 0.0032, 1e-16);
  EXPECT_TRUE(kl.bound_applicable);
  EXPECT_EQ(kl_exact(p, Vector::Zero(2)), 0.0);

  const KlComparison four = kl_compare(vec({0.1, 0.35, 0.6, 0.8}), vec({0.01, -0.02, 0.015, 0.005}));
  EXPECT_NEAR(four.exact, 0.0020652767424439197028, 1e-16);
}

TEST(Kl, OutsideValidityStillReported) {
  const KlComparison kl = kl_compare(vec({0.25, 0.5}), vec({0.2, 0.0}));
  EXPECT_FALSE(kl.bound_applicable);
  EXPECT_GT(kl.exact, 0.0);
  EXPECT_THROW(kl_exact(vec({0.25, 0.5}), vec({0.3, 0.0})), std::invalid_argument);
}

TEST(Gap, LinearIsExactlyFirstOrder) {
  LinearReward r(2);
  const SortedProfile prof = sorted_profile(vec({0.5, 0.25}), SubsetSpec::empty(2));
  const Vector eps = vec({0.01, 0.002});
  EXPECT_NEAR(gap_exact(r, prof, eps), 2 * 0.01 + 0.002, 1e-15);
  EXPECT_EQ(gap_exact(r, prof, Vector::Zero(2)), 0.0);
  EXPECT_THROW(gap_exact(r, prof, vec({0.3, 0.0})), std::invalid_argument);
}

TEST(Family, TiesCollapseIntoGroups) {
  LinearReward r(3);
  const PerturbationFamily fam(r, vec({0.5, 0.5, 0.5}), SubsetSpec::empty(3));
  EXPECT_EQ(fam.groups().distinct.size(), 1);
  EXPECT_DOUBLE_EQ(fam.cumulative_distinct()[0], 3.0);
  EXPECT_DOUBLE_EQ(fam.direction()[0], 0.75);
  EXPECT_DOUBLE_EQ(fam.validity_radius(), 0.25);
  EXPECT_EQ(fam.epsilon_full(1.0), vec({0.75, 0.0, 0.0}));
  EXPECT_NEAR(fam.gap(0.1), 0.225, 1e-15);
}

TEST(Family, RefusesPositionDependentReward) {
  PowerGradientReward r(3);
  EXPECT_THROW(PerturbationFamily(r, vec({0.2, 0.4, 0.6}), SubsetSpec::empty(3)), std::invalid_argument);
}

TEST(Family, GapReachabilityLinear) {
  LinearReward r(2);
  const PerturbationFamily fam(r, vec({0.25, 0.5}), SubsetSpec::empty(2));
  EXPECT_DOUBLE_EQ(fam.max_scale(), 0.4);
  EXPECT_NEAR(fam.max_gap(), 0.275, 1e-15);
  try {
    fam.scale_for_gap(0.3);
    FAIL() << "expected GapUnreachable";
  } catch (const GapUnreachable& e) {
    EXPECT_NEAR(e.achievable(), 0.275, 1e-15);
  }
}

TEST(Build, DependentWorkedExample) {
  LinearReward r(2);
  const DisjointInstance inst = build_dependent_instance(r, vec({0.25, 0.5}), 0.01, 10);
  EXPECT_EQ(inst.actions.size(), 5u);
  EXPECT_TRUE(inst.subset.indices().empty());
  EXPECT_NEAR(inst.gap, 0.01, 1e-8);
  EXPECT_NEAR(inst.epsilon[0] / inst.epsilon[1], 5.0, 1e-9);
  EXPECT_NEAR(inst.bound.value, 25.78125, 1e-12);
  EXPECT_EQ(inst.optimal_index, 4u);
  EXPECT_NO_THROW(validate_instance(inst));
}

TEST(Build, DependentErrors) {
  LinearReward r(2);
  EXPECT_THROW(build_dependent_instance(r, vec({0.25, 0.5}), 0.0, 10), std::invalid_argument);
  EXPECT_THROW(build_dependent_instance(r, vec({0.25, 0.5}), 0.01, 4), std::invalid_argument);
  EXPECT_THROW(build_dependent_instance(r, vec({0.25, 0.5}), 0.5, 10), GapUnreachable);
  ExpQuadraticReward flat(2);
  EXPECT_THROW(build_dependent_instance(flat, vec({0.0, 0.0}), 0.01, 10), std::invalid_argument);
}

TEST(Build, PmcUsesSingleVaryingArm) {
  PmcItemReward r(3);
  const DisjointInstance inst = build_dependent_instance(r, vec({0.5, 0.0, 0.0}), 0.01, 20);
  EXPECT_EQ(inst.subset.indices(), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(inst.complement_size(), 1u);
  EXPECT_EQ(inst.p, vec({0.5}));
  EXPECT_EQ(inst.actions.size(), 18u);
}

TEST(Build, IndependentWorkedExample) {
  LinearReward r(2);
  const DisjointInstance inst = build_independent_instance(r, vec({0.25, 0.5}), 10, 1e6);
  const double expected_gap = std::sqrt(0.6875) / 8.0 * std::sqrt(8.0 / 2e6);
  EXPECT_NEAR(inst.gap, expected_gap, 1e-6 * expected_gap);
  EXPECT_NEAR(inst.gap, 2.0729e-4, 1e-8);
  EXPECT_NEAR(inst.bound.value, std::sqrt(0.6875) / 32.0 * std::sqrt(1e6 * 8 / 2), 1e-12);
  ASSERT_TRUE(inst.bound.min_horizon.has_value());
}

TEST(Build, IndependentHorizonAndArmLimits) {
  LinearReward r(2);
  EXPECT_NO_THROW(build_independent_instance(r, vec({0.25, 0.5}), 6, 1e4));
  EXPECT_THROW(build_independent_instance(r, vec({0.25, 0.5}), 5, 1e4), std::invalid_argument);
  ExpQuadraticReward eq(3);
  const Vector mu = vec({0.2, 0.4, 0.6});
  double t0 = 0.0;
  try {
    build_independent_instance(eq, mu, 30, 1.0);
    FAIL() << "expected HorizonTooShort";
  } catch (const HorizonTooShort& e) {
    t0 = e.minimum();
    EXPECT_NE(std::string(e.what()).find("T0"), std::string::npos);
  }
  EXPECT_GT(t0, 1.0);
  EXPECT_NO_THROW(build_independent_instance(eq, mu, 30, t0));
  EXPECT_THROW(build_independent_instance(eq, mu, 30, t0 - 1.0), HorizonTooShort);
}

TEST(Build, ActionsIntersectExactlyInCommonSet) {
  PmcItemReward r(4);
  const DisjointInstance inst = build_dependent_instance(r, vec({0.6, 0.3, 0.0, 0.1}), 0.005, 23);
  const std::size_t common = inst.common_size();
  for (std::size_t a = 0; a < inst.actions.size(); ++a) {
    for (std::size_t b = a + 1; b < inst.actions.size(); ++b) {
      std::set<std::size_t> sa(inst.actions[a].begin(), inst.actions[a].end());
      std::size_t shared = 0;
      for (std::size_t arm : inst.actions[b]) shared += sa.count(arm);
      EXPECT_EQ(shared, common);
    }
  }
  EXPECT_GE(static_cast<double>(inst.actions.size()),
            static_cast<double>(inst.m - inst.k) / static_cast<double>(inst.complement_size()));
  EXPECT_LE(inst.used_arms(), inst.m);
}

TEST(Validate, RejectsBrokenInstances) {
  LinearReward r(2);
  DisjointInstance inst = build_dependent_instance(r, vec({0.25, 0.5}), 0.01, 10);
  DisjointInstance shared = inst;
  shared.actions[1][0] = shared.actions[0][0];
  EXPECT_THROW(validate_instance(shared), std::invalid_argument);
  DisjointInstance big_eps = inst;
  big_eps.epsilon[0] = 0.3;
  EXPECT_THROW(validate_instance(big_eps), std::invalid_argument);
  DisjointInstance bad_opt = inst;
  bad_opt.optimal_index = 9;
  EXPECT_THROW(validate_instance(bad_opt), std::invalid_argument);
}

TEST(Sampling, ThresholdUnrollAndMarginals) {
  LinearReward r(2);
  const DisjointInstance inst = build_dependent_instance(r, vec({0.25, 0.5}), 0.05, 6);
  Rng rng(7);
  const std::size_t draws = 400000;
  for (std::size_t a = 0; a < inst.actions.size(); ++a) {
    std::vector<double> ones(2, 0.0);
    for (std::size_t d = 0; d < draws; ++d) {
      const auto obs = sample_round(inst, rng, a);
      ASSERT_EQ(obs.size(), 2u);
      // Staircase support: coordinate 0 on implies coordinate 1 on.
      ASSERT_LE(obs[0].second, obs[1].second);
      ones[0] += obs[0].second;
      ones[1] += obs[1].second;
    }
    const Vector q = a == inst.optimal_index ? inst.optimal_thresholds() : inst.perturbed_thresholds();
    for (int j = 0; j < 2; ++j) {
      const double sigma = std::sqrt(q[j] * (1 - q[j]) / draws);
      EXPECT_LE(std::abs(ones[j] / draws - q[j]), 3 * sigma);
    }
  }
}

TEST(Sampling, TiedArmsEmitIdenticalBits) {
  LinearReward r(3);
  const DisjointInstance inst = build_dependent_instance(r, vec({0.5, 0.5, 0.5}), 0.1, 15);
  Rng rng(3);
  for (int d = 0; d < 1000; ++d) {
    const auto obs = sample_round(inst, rng, 0);
    EXPECT_EQ(obs[0].second, obs[1].second);
    EXPECT_EQ(obs[1].second, obs[2].second);
  }
}
