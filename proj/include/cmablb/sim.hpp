#pragma once

#include "cmablb/instance.hpp"
#include "cmablb/rewards.hpp"
#include "cmablb/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cmablb {

enum class StrategyKind { oracle, round_robin, epsilon_greedy, cucb, bcucb };

StrategyKind parse_strategy(std::string_view s);
std::string_view to_string(StrategyKind kind);
const std::vector<std::string>& strategy_names();

/// Running count, mean and variance (Welford) of one base arm.
struct ArmStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  double variance() const { return count == 0 ? 0.0 : m2 / static_cast<double>(count); }
};

struct StrategyOptions {
  /// Exploration probability for epsilon-greedy.
  double epsilon = 0.05;
};

/// A strategy playing on a DisjointInstance with semi-bandit feedback.
/// Index strategies and epsilon-greedy start with one forced pull of every
/// action, in order.
class Strategy {
 public:
  Strategy(StrategyKind kind, const DisjointInstance& inst, RewardPtr reward, StrategyOptions options = {});

  StrategyKind kind() const { return kind_; }
  /// Action for round t (t >= 1). `rng` is used by epsilon-greedy only.
  std::size_t select(std::uint64_t t, Rng& rng);
  void update(std::size_t action, const std::vector<std::pair<std::size_t, std::uint8_t>>& feedback);

  const std::vector<ArmStats>& arm_stats() const { return arms_; }
  const std::vector<std::uint64_t>& action_pulls() const { return pulls_; }
  std::uint64_t rounds() const { return rounds_; }

 private:
  /// argmax_a r(values of a's arms); ties go to the lowest index.
  std::size_t best_action(const std::vector<double>& arm_values) const;

  StrategyKind kind_;
  const DisjointInstance* inst_;
  RewardPtr reward_;
  StrategyOptions options_;
  std::vector<ArmStats> arms_;
  std::vector<std::uint64_t> pulls_;
  std::uint64_t rounds_ = 0;
  mutable Vector scratch_;
};

/// Free-function form of Strategy::select.
inline std::size_t strategy_step(Strategy& strategy, std::uint64_t t, Rng& rng) { return strategy.select(t, rng); }

/// FNV-1a over the instance's defining fields.
std::uint64_t instance_fingerprint(const DisjointInstance& inst);

/// Powers of two up to T, plus T.
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t horizon);

struct RegretTrace {
  StrategyKind strategy = StrategyKind::oracle;
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
  std::uint64_t instance = 0;  // fingerprint
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> cumulative_regret;
  std::vector<std::uint64_t> action_pulls;
  /// Per-arm empirical means and counts at T.
  std::vector<ArmStats> arm_stats;
  BoundAnnotation bound;

  double final_regret() const { return cumulative_regret.empty() ? 0.0 : cumulative_regret.back(); }
};

/// Pseudo-regret r(S*) - r(S_a) of every action from the true means.
std::vector<double> action_regrets(const DisjointInstance& inst, const RewardModel& reward);

/// One episode. The environment draws from Rng::stream(seed, 0) and the
/// strategy from Rng::stream(seed, 1).
RegretTrace run_episode(const DisjointInstance& inst, StrategyKind kind, std::uint64_t horizon, std::uint64_t seed,
                        StrategyOptions options = {});

/// Episodes for each seed, spread over `workers` threads; output order
/// follows `seeds`.
std::vector<RegretTrace> run_replications(const DisjointInstance& inst, StrategyKind kind, std::uint64_t horizon,
                                          const std::vector<std::uint64_t>& seeds, unsigned workers = 1,
                                          StrategyOptions options = {});

enum class BandFlag { degenerate, low, in_band, high };
std::string_view to_string(BandFlag flag);

inline constexpr double kBandLow = 0.05;
inline constexpr double kBandHigh = 100.0;
inline constexpr std::size_t kMinSeeds = 10;

struct BoundComparison {
  StrategyKind strategy = StrategyKind::oracle;
  std::size_t seeds = 0;
  std::uint64_t horizon = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  /// DB* ln T for dependent instances, IB* for independent ones.
  double reference = 0.0;
  double ratio = 0.0;
  BandFlag flag = BandFlag::degenerate;
};

/// Needs at least kMinSeeds traces from the same instance, strategy and
/// horizon.
BoundComparison compare_to_bound(const std::vector<RegretTrace>& traces, const DisjointInstance& inst);

/// Headered CSV: seed,t,cumulative_regret.
std::string traces_to_csv(const std::vector<RegretTrace>& traces);

}  // namespace cmablb
