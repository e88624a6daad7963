#include "cmablb/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>

namespace cmablb {

namespace {

const std::vector<std::pair<std::string_view, StrategyKind>>& strategy_table() {
  static const std::vector<std::pair<std::string_view, StrategyKind>> table = {
      {"oracle", StrategyKind::oracle},
      {"round-robin", StrategyKind::round_robin},
      {"epsilon-greedy", StrategyKind::epsilon_greedy},
      {"cucb", StrategyKind::cucb},
      {"bcucb", StrategyKind::bcucb},
  };
  return table;
}

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void vec(const Vector& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

// Values of action a in profile layout: block arms, then common arms.
void gather(const DisjointInstance& inst, std::size_t a, const std::vector<double>& arm_values, Vector& out) {
  const auto& arms = inst.actions[a];
  const std::size_t common = inst.common_size();
  const std::size_t n = inst.complement_size();
  out.resize(static_cast<Eigen::Index>(arms.size()));
  for (std::size_t j = 0; j < n; ++j) out[static_cast<Eigen::Index>(j)] = arm_values[arms[common + j]];
  for (std::size_t i = 0; i < common; ++i) out[static_cast<Eigen::Index>(n + i)] = arm_values[arms[i]];
}

}  // namespace

StrategyKind parse_strategy(std::string_view s) {
  for (const auto& [name, kind] : strategy_table()) {
    if (name == s) return kind;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

std::string_view to_string(StrategyKind kind) {
  for (const auto& [name, k] : strategy_table()) {
    if (k == kind) return name;
  }
  return "?";
}

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : strategy_table()) out.emplace_back(entry.first);
    return out;
  }();
  return names;
}

Strategy::Strategy(StrategyKind kind, const DisjointInstance& inst, RewardPtr reward, StrategyOptions options)
    : kind_(kind), inst_(&inst), reward_(std::move(reward)), options_(options), arms_(inst.m),
      pulls_(inst.actions.size(), 0) {
  if (!reward_) throw std::invalid_argument("strategy needs a reward model");
  if (reward_->action_size() != inst.k) throw std::invalid_argument("reward size does not match the instance");
  if ((kind == StrategyKind::cucb || kind == StrategyKind::bcucb) && !reward_->monotone()) {
    throw std::invalid_argument("optimistic strategies need a monotone reward");
  }
  if (!(options_.epsilon >= 0.0 && options_.epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
}

std::size_t Strategy::best_action(const std::vector<double>& arm_values) const {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < inst_->actions.size(); ++a) {
    gather(*inst_, a, arm_values, scratch_);
    const double v = reward_->evaluate(scratch_);
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

std::size_t Strategy::select(std::uint64_t t, Rng& rng) {
  const std::size_t count = inst_->actions.size();
  switch (kind_) {
    case StrategyKind::oracle:
      return inst_->optimal_index;
    case StrategyKind::round_robin:
      return static_cast<std::size_t>((t - 1) % count);
    default:
      break;
  }
  if (t <= count) return static_cast<std::size_t>(t - 1);

  std::vector<double> values(arms_.size(), 0.0);
  if (kind_ == StrategyKind::epsilon_greedy) {
    if (rng.uniform() < options_.epsilon) return static_cast<std::size_t>(rng.below(count));
    for (std::size_t i = 0; i < arms_.size(); ++i) values[i] = arms_[i].mean;
    return best_action(values);
  }
  const double log_t = std::log(static_cast<double>(t));
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const ArmStats& s = arms_[i];
    if (s.count == 0) continue;
    const double n = static_cast<double>(s.count);
    double index;
    if (kind_ == StrategyKind::cucb) {
      index = s.mean + std::sqrt(1.5 * log_t / n);
    } else {
      index = s.mean + std::sqrt(2.0 * s.variance() * log_t / n) + 3.0 * log_t / n;
    }
    values[i] = std::clamp(index, 0.0, 1.0);
  }
  return best_action(values);
}

void Strategy::update(std::size_t action, const std::vector<std::pair<std::size_t, std::uint8_t>>& feedback) {
  ++rounds_;
  ++pulls_.at(action);
  for (const auto& [arm, bit] : feedback) arms_[arm].add(bit);
}

std::uint64_t instance_fingerprint(const DisjointInstance& inst) {
  Fnv1a h;
  h.u64(inst.m);
  h.u64(inst.k);
  for (std::size_t i : inst.subset.indices()) h.u64(i);
  h.vec(inst.mu);
  h.vec(inst.mu_common);
  h.vec(inst.p);
  for (std::size_t g : inst.groups) h.u64(g);
  h.vec(inst.epsilon);
  h.u64(inst.actions.size());
  for (const auto& act : inst.actions) {
    for (std::size_t arm : act) h.u64(arm);
  }
  h.u64(inst.optimal_index);
  h.f64(inst.gap);
  h.bytes(inst.reward_name.data(), inst.reward_name.size());
  return h.value();
}

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t horizon) {
  std::vector<std::uint64_t> grid;
  for (std::uint64_t t = 1; t < horizon; t *= 2) grid.push_back(t);
  if (horizon >= 1) grid.push_back(horizon);
  return grid;
}

std::vector<double> action_regrets(const DisjointInstance& inst, const RewardModel& reward) {
  const double best = reward.evaluate(inst.action_means(inst.optimal_index));
  std::vector<double> out(inst.actions.size());
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = a == inst.optimal_index ? 0.0 : best - reward.evaluate(inst.action_means(a));
  }
  return out;
}

RegretTrace run_episode(const DisjointInstance& inst, StrategyKind kind, std::uint64_t horizon, std::uint64_t seed,
                        StrategyOptions options) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const RewardPtr reward = make_reward(inst.reward_name, inst.k);
  Strategy strategy(kind, inst, reward, options);
  const std::vector<double> regrets = action_regrets(inst, *reward);

  RegretTrace trace;
  trace.strategy = kind;
  trace.horizon = horizon;
  trace.seed = seed;
  trace.instance = instance_fingerprint(inst);
  trace.checkpoints = checkpoint_grid(horizon);
  trace.bound = inst.bound;

  Rng env = Rng::stream(seed, 0);
  Rng policy = Rng::stream(seed, 1);
  double cumulative = 0.0;
  std::size_t next = 0;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const std::size_t a = strategy.select(t, policy);
    strategy.update(a, sample_round(inst, env, a));
    cumulative += regrets[a];
    if (t == trace.checkpoints[next]) {
      trace.cumulative_regret.push_back(cumulative);
      ++next;
    }
  }
  trace.action_pulls = strategy.action_pulls();
  trace.arm_stats = strategy.arm_stats();
  return trace;
}

std::vector<RegretTrace> run_replications(const DisjointInstance& inst, StrategyKind kind, std::uint64_t horizon,
                                          const std::vector<std::uint64_t>& seeds, unsigned workers,
                                          StrategyOptions options) {
  std::vector<RegretTrace> out(seeds.size());
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(workers, seeds.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) out[i] = run_episode(inst, kind, horizon, seeds[i], options);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < seeds.size(); i += threads) {
          out[i] = run_episode(inst, kind, horizon, seeds[i], options);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string_view to_string(BandFlag flag) {
  switch (flag) {
    case BandFlag::degenerate:
      return "degenerate";
    case BandFlag::low:
      return "low";
    case BandFlag::in_band:
      return "in-band";
    case BandFlag::high:
      return "high";
  }
  return "?";
}

BoundComparison compare_to_bound(const std::vector<RegretTrace>& traces, const DisjointInstance& inst) {
  if (traces.size() < kMinSeeds) {
    throw std::invalid_argument("comparison needs at least " + std::to_string(kMinSeeds) + " seeds");
  }
  const std::uint64_t fp = instance_fingerprint(inst);
  for (const RegretTrace& t : traces) {
    if (t.instance != fp) throw std::invalid_argument("trace was produced on a different instance");
    if (t.strategy != traces.front().strategy || t.horizon != traces.front().horizon) {
      throw std::invalid_argument("traces mix strategies or horizons");
    }
  }
  BoundComparison out;
  out.strategy = traces.front().strategy;
  out.seeds = traces.size();
  out.horizon = traces.front().horizon;
  const double n = static_cast<double>(traces.size());
  for (const RegretTrace& t : traces) out.mean += t.final_regret();
  out.mean /= n;
  double ss = 0.0;
  for (const RegretTrace& t : traces) ss += (t.final_regret() - out.mean) * (t.final_regret() - out.mean);
  out.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  out.reference = inst.bound.kind == BoundKind::dependent
                      ? inst.bound.value * std::log(static_cast<double>(out.horizon))
                      : inst.bound.value;
  out.ratio = out.reference > 0.0 ? out.mean / out.reference : 0.0;
  if (out.mean == 0.0 || out.reference <= 0.0) {
    out.flag = BandFlag::degenerate;
  } else if (out.ratio < kBandLow) {
    out.flag = BandFlag::low;
  } else if (out.ratio > kBandHigh) {
    out.flag = BandFlag::high;
  } else {
    out.flag = BandFlag::in_band;
  }
  return out;
}

std::string traces_to_csv(const std::vector<RegretTrace>& traces) {
  std::string out = "seed,t,cumulative_regret\n";
  char buf[64];
  for (const RegretTrace& tr : traces) {
    for (std::size_t i = 0; i < tr.checkpoints.size(); ++i) {
      auto r = std::to_chars(buf, buf + sizeof buf, tr.seed);
      out.append(buf, r.ptr);
      out.push_back(',');
      r = std::to_chars(buf, buf + sizeof buf, tr.checkpoints[i]);
      out.append(buf, r.ptr);
      out.push_back(',');
      r = std::to_chars(buf, buf + sizeof buf, tr.cumulative_regret[i]);
      out.append(buf, r.ptr);
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace cmablb
