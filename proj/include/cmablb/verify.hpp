#pragma once

#include "cmablb/rewards.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cmablb {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::uint64_t seed = 0;
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// Suite names accepted by run_suite, excluding "all".
const std::vector<std::string>& suite_names();

/// Runs one suite ("all" runs every suite in suite_names() order). Trial i of
/// a suite draws from Rng::stream(mix(seed, suite), i), so reports depend only
/// on (suite, seed, trials).
VerifyReport run_suite(std::string_view suite, std::uint64_t seed = 1, std::size_t trials = 1000);

/// r(mu) = sum_i sin(2 pi mu_i) / (2 pi): symmetric, smooth, not monotone.
class OscillatingReward final : public RewardModel {
 public:
  explicit OscillatingReward(std::size_t k);

 protected:
  double value_at(const Vector& mu) const override;
  Vector gradient_at(const Vector& mu) const override;
};

}  // namespace cmablb
