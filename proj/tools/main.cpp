#include "cmablb/bounds.hpp"
#include "cmablb/instance.hpp"
#include "cmablb/io.hpp"
#include "cmablb/sim.hpp"
#include "cmablb/smoothness.hpp"
#include "cmablb/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace cmablb;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  f << text;
}

Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

struct ModelArgs {
  std::string model;
  std::string mu;
  std::size_t copies = 1;

  void add_to(CLI::App* app, bool allow_copies) {
    app->add_option("--model", model, "Reward model")->required()->check(CLI::IsMember(reward_names()));
    app->add_option("--mu", mu, "Comma-separated arm means")->required();
    if (allow_copies) app->add_option("--copies", copies, "Number of summed copies")->check(CLI::PositiveNumber);
  }

  Vector means() const { return parse_csv_vector(mu); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower-bound instances and smoothness measures for combinatorial semi-bandits"};
  app.require_subcommand(1);
  unsigned workers = default_workers();
  app.add_option("--workers", workers, "Worker threads (default from CMABLB_WORKERS)")->check(CLI::PositiveNumber);
  std::string out_path;

  // smoothness
  auto* smooth = app.add_subcommand("smoothness", "Gini-weighted smoothness measures");
  ModelArgs smooth_model;
  smooth_model.add_to(smooth, true);
  std::optional<std::string> subset_arg;
  std::optional<std::string> maximize_arg;
  std::string objective_arg = "raw";
  std::string method_arg = "brute";
  auto* subset_opt = smooth->add_option("--subset", subset_arg, "Comma-separated 0-based common indices");
  auto* max_opt = smooth->add_option("--maximize", maximize_arg, "Maximize a measure over subsets")
                      ->check(CLI::IsMember({"l2", "l1", "modified"}));
  subset_opt->excludes(max_opt);
  smooth->add_option("--objective", objective_arg)->check(CLI::IsMember({"raw", "per-arm"}));
  smooth->add_option("--method", method_arg)->check(CLI::IsMember({"brute", "prefix"}));
  smooth->add_option("--out", out_path, "Output file (default stdout)");

  // build
  auto* build = app.add_subcommand("build", "Construct a worst-case disjoint instance");
  ModelArgs build_model;
  build_model.add_to(build, false);
  std::size_t build_m = 0;
  std::optional<double> build_gap;
  std::optional<double> build_horizon;
  std::optional<std::size_t> optimal_index;
  build->add_option("--m", build_m, "Total number of arms")->required();
  auto* bg = build->add_option("--gap", build_gap, "Target gap (dependent construction)");
  auto* bh = build->add_option("--horizon", build_horizon, "Horizon T (independent construction)");
  bg->excludes(bh);
  build->add_option("--optimal-index", optimal_index, "Action carrying the optimal law (default: last)");
  build->add_option("--out", out_path, "Output file (default stdout)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate the regret lower bounds");
  ModelArgs bounds_model;
  bounds_model.add_to(bounds, true);
  std::size_t bounds_m = 0;
  std::optional<double> bounds_gap;
  std::optional<double> bounds_horizon;
  bounds->add_option("--m", bounds_m, "Total number of arms")->required();
  auto* dg = bounds->add_option("--gap", bounds_gap, "Gap for the problem-dependent bound");
  auto* dh = bounds->add_option("--horizon", bounds_horizon, "Horizon for the problem-independent bound");
  dg->excludes(dh);
  bounds->add_option("--out", out_path, "Output file (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate a strategy on an instance");
  std::string instance_path;
  std::string strategy_arg;
  std::uint64_t horizon = 0;
  std::size_t seed_count = 1;
  std::uint64_t base_seed = 1;
  double epsilon = StrategyOptions{}.epsilon;
  std::string summary_path;
  simulate->add_option("--instance", instance_path, "Instance JSON from `build`")->required();
  simulate->add_option("--strategy", strategy_arg)->required()->check(CLI::IsMember(strategy_names()));
  simulate->add_option("--horizon", horizon, "Rounds per episode")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seeds", seed_count, "Number of episodes")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", base_seed, "First seed; episodes use seed, seed+1, ...");
  simulate->add_option("--epsilon", epsilon, "Exploration rate for epsilon-greedy")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--summary", summary_path, "Write the bound comparison JSON here (needs >= 10 seeds)");
  simulate->add_option("--out", out_path, "Trace CSV (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Run property-check suites");
  std::string suite = "all";
  std::uint64_t verify_seed = 1;
  std::size_t trials = 1000;
  bool list = false;
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  verify->add_option("--suite", suite)->check(CLI::IsMember(suites));
  verify->add_option("--seed", verify_seed);
  verify->add_option("--trials", trials)->check(CLI::PositiveNumber);
  verify->add_flag("--list", list, "Print the suite manifest and exit");
  verify->add_option("--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*smooth) {
      const Vector mu = smooth_model.means();
      const std::size_t copies = smooth_model.copies;
      if (mu.size() == 0 || mu.size() % static_cast<Eigen::Index>(copies) != 0) {
        throw std::invalid_argument("--mu length must be a positive multiple of --copies");
      }
      const RewardPtr r = make_reward(smooth_model.model, static_cast<std::size_t>(mu.size()) / copies, copies);
      if (maximize_arg) {
        const Measure measure = parse_measure(*maximize_arg);
        const Objective objective = parse_objective(objective_arg);
        const SearchMethod method = parse_search_method(method_arg);
        const SubsetOptimum best = maximize_over_subsets(measure, objective, *r, mu, method, workers);
        Json j = to_json(best, measure, objective, method);
        j["report"] = to_json(smoothness_report(*r, mu, best.subset));
        emit(out_path, dump(j));
      } else {
        const SubsetSpec subset(static_cast<std::size_t>(mu.size()),
                                subset_arg ? parse_csv_indices(*subset_arg) : std::vector<std::size_t>{});
        emit(out_path, dump(to_json(smoothness_report(*r, mu, subset))));
      }
      return kExitPass;
    }
    if (*build) {
      if (!build_gap && !build_horizon) throw CLI::RequiredError("--gap or --horizon");
      const Vector mu = build_model.means();
      const RewardPtr r = make_reward(build_model.model, static_cast<std::size_t>(mu.size()));
      BuildOptions options;
      options.optimal_index = optimal_index;
      options.workers = workers;
      const DisjointInstance inst = build_gap ? build_dependent_instance(*r, mu, *build_gap, build_m, options)
                                              : build_independent_instance(*r, mu, build_m, *build_horizon, options);
      emit(out_path, dump(to_json(inst)));
      return kExitPass;
    }
    if (*bounds) {
      if (!bounds_gap && !bounds_horizon) throw CLI::RequiredError("--gap or --horizon");
      const Vector mu = bounds_model.means();
      const RewardPtr r = make_reward(bounds_model.model, static_cast<std::size_t>(mu.size()));
      BoundReport report = bounds_gap ? dependent_bound(*r, mu, bounds_m, *bounds_gap, workers)
                                      : independent_bound(*r, mu, bounds_m, *bounds_horizon, workers);
      report = sum_copies_bound(report, bounds_model.copies);
      emit(out_path, dump(to_json(report)));
      return kExitPass;
    }
    if (*simulate) {
      const DisjointInstance inst = instance_from_json(read_json(instance_path));
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = 0; i < seed_count; ++i) seeds.push_back(base_seed + i);
      StrategyOptions options;
      options.epsilon = epsilon;
      const auto traces = run_replications(inst, parse_strategy(strategy_arg), horizon, seeds, workers, options);
      if (!summary_path.empty()) emit(summary_path, dump(to_json(compare_to_bound(traces, inst))));
      emit(out_path, traces_to_csv(traces));
      return kExitPass;
    }
    if (*verify) {
      if (list) {
        Json manifest{{"schema_version", kSchemaVersion}, {"suites", suite_names()}};
        emit(out_path, dump(manifest));
        return kExitPass;
      }
      const VerifyReport report = run_suite(suite, verify_seed, trials);
      emit(out_path, dump(to_json(report)));
      return report.passed() ? kExitPass : kExitFail;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
