#include "cmablb/sim.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

using namespace cmablb;

namespace {

DisjointInstance small_instance() {
  LinearReward r(2);
  Vector mu(2);
  mu << 0.25, 0.5;
  return build_dependent_instance(r, mu, 0.05, 10);
}

}  // namespace

TEST(Strategy, OracleHasNoRegret) {
  const DisjointInstance inst = small_instance();
  const RegretTrace t = run_episode(inst, StrategyKind::oracle, 1000, 3);
  EXPECT_EQ(t.final_regret(), 0.0);
  EXPECT_EQ(t.action_pulls[inst.optimal_index], 1000u);
}

TEST(Strategy, RoundRobinMatchesClosedForm) {
  const DisjointInstance inst = small_instance();
  const auto regrets = action_regrets(inst, LinearReward(2));
  const std::uint64_t horizon = 1237;
  const RegretTrace t = run_episode(inst, StrategyKind::round_robin, horizon, 5);
  double expected = 0.0;
  for (std::uint64_t s = 0; s < horizon; ++s) expected += regrets[s % regrets.size()];
  EXPECT_NEAR(t.final_regret(), expected, 1e-9);
  for (std::size_t a = 0; a < inst.actions.size(); ++a) {
    EXPECT_NEAR(regrets[a], a == inst.optimal_index ? 0.0 : inst.gap, 1e-12);
  }
}

TEST(Strategy, ForcedInitializationVisitsEveryAction) {
  const DisjointInstance inst = small_instance();
  Strategy s(StrategyKind::cucb, inst, make_reward("linear", 2));
  Rng rng(1);
  for (std::uint64_t t = 1; t <= inst.actions.size(); ++t) EXPECT_EQ(s.select(t, rng), t - 1);
}

TEST(Strategy, TiesGoToLowestIndex) {
  const DisjointInstance inst = small_instance();
  Strategy s(StrategyKind::epsilon_greedy, inst, make_reward("linear", 2), StrategyOptions{0.0});
  Rng rng(1);
  // All arm means are still zero after no updates.
  EXPECT_EQ(s.select(inst.actions.size() + 1, rng), 0u);
}

TEST(Strategy, RejectsNonMonotoneForOptimism) {
  const DisjointInstance inst = small_instance();
  EXPECT_THROW(Strategy(StrategyKind::cucb, inst, nullptr), std::invalid_argument);
  EXPECT_THROW(Strategy(StrategyKind::epsilon_greedy, inst, make_reward("linear", 2), StrategyOptions{1.5}),
               std::invalid_argument);
  EXPECT_THROW(parse_strategy("thompson"), std::invalid_argument);
}

TEST(Episode, RegretIsMonotoneAndBounded) {
  const DisjointInstance inst = small_instance();
  for (StrategyKind k : {StrategyKind::cucb, StrategyKind::bcucb, StrategyKind::epsilon_greedy}) {
    const RegretTrace t = run_episode(inst, k, 4096, 11);
    ASSERT_EQ(t.checkpoints, checkpoint_grid(4096));
    for (std::size_t i = 0; i < t.checkpoints.size(); ++i) {
      EXPECT_LE(t.cumulative_regret[i], static_cast<double>(t.checkpoints[i]) * inst.gap + 1e-9);
      if (i > 0) EXPECT_GE(t.cumulative_regret[i], t.cumulative_regret[i - 1]);
    }
  }
}

TEST(Episode, CheckpointGrid) {
  EXPECT_EQ(checkpoint_grid(1), (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(checkpoint_grid(10), (std::vector<std::uint64_t>{1, 2, 4, 8, 10}));
  EXPECT_EQ(checkpoint_grid(8), (std::vector<std::uint64_t>{1, 2, 4, 8}));
}

TEST(Replications, DeterministicAcrossWorkers) {
  const DisjointInstance inst = small_instance();
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 12; ++s) seeds.push_back(s);
  const auto serial = run_replications(inst, StrategyKind::cucb, 2000, seeds, 1);
  const auto parallel = run_replications(inst, StrategyKind::cucb, 2000, seeds, 4);
  EXPECT_EQ(traces_to_csv(serial), traces_to_csv(parallel));
  EXPECT_EQ(traces_to_csv(serial).rfind("seed,t,cumulative_regret\n", 0), 0u);
}

TEST(Comparison, NeedsEnoughSeedsAndOneInstance) {
  const DisjointInstance inst = small_instance();
  std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto few = run_replications(inst, StrategyKind::cucb, 500, seeds);
  EXPECT_THROW(compare_to_bound(few, inst), std::invalid_argument);

  for (std::uint64_t s = 4; s <= 10; ++s) seeds.push_back(s);
  const auto traces = run_replications(inst, StrategyKind::cucb, 500, seeds);
  const BoundComparison cmp = compare_to_bound(traces, inst);
  EXPECT_EQ(cmp.seeds, 10u);
  EXPECT_GT(cmp.reference, 0.0);
  EXPECT_NEAR(cmp.ratio, cmp.mean / cmp.reference, 1e-12);

  LinearReward r(2);
  Vector mu(2);
  mu << 0.25, 0.5;
  const DisjointInstance other = build_dependent_instance(r, mu, 0.04, 10);
  EXPECT_THROW(compare_to_bound(traces, other), std::invalid_argument);
}
