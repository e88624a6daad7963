#pragma once

#include "cmablb/rewards.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace cmablb {

/// A set I of common coordinates within an action of size K (0-based).
class SubsetSpec {
 public:
  SubsetSpec() = default;
  /// Throws std::invalid_argument on duplicate or out-of-range indices.
  SubsetSpec(std::size_t k, std::vector<std::size_t> indices);
  static SubsetSpec empty(std::size_t k) { return SubsetSpec(k, {}); }
  /// Bit i of `mask` set <=> i in I. Requires k <= 63.
  static SubsetSpec from_mask(std::size_t k, std::uint64_t mask);

  std::size_t action_size() const { return k_; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t complement_size() const { return k_ - indices_.size(); }
  bool contains(std::size_t i) const;
  std::vector<std::size_t> complement() const;

  friend bool operator==(const SubsetSpec&, const SubsetSpec&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::size_t> indices_;
};

/// p^{mu,I}: the complement of I sorted ascending (stable), then mu_I in index
/// order. values[j] == mu[permutation[j]].
struct SortedProfile {
  Vector values;
  std::vector<std::size_t> permutation;
  std::size_t complement_size = 0;

  /// The first complement_size entries.
  Vector complement_values() const { return values.head(static_cast<Eigen::Index>(complement_size)); }
};

SortedProfile sorted_profile(const Vector& mu, const SubsetSpec& subset);

/// Gradient of `reward` at mu, reordered to the profile layout. For index
/// invariant rewards this equals the gradient evaluated at the profile itself.
Vector profile_gradient(const RewardModel& reward, const Vector& mu, const SortedProfile& profile);

/// sum_{i not in I} mu_i (1 - mu_i) grad_i r(mu)^2
double gini_l2(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset);
/// Same quantity evaluated on the profile side, with the gradient taken at p.
double gini_l2_profile(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset);
/// (sum_{i not in I} sqrt(mu_i (1 - mu_i)) grad_i r(mu))^2
double gini_l1(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset);
/// Modified Gini-weighted smoothness, evaluated by its double sum over the
/// sorted complement.
double gini_modified(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset);
/// The modified smoothness written as Var(X) with P(X = c_i) = p_i - p_{i-1},
/// c_i the suffix sums of the profile gradient.
double variance_form(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset);

/// Right-hand side of the modified/L1 relation: gini_l1 / (3 + ln(1/p_1) +
/// ln(1/(1 - p_N))), defined as 0 when p_1 = 0 or p_N = 1 or N = 0.
double modified_l1_relation_rhs(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset);

struct SmoothnessReport {
  double l2 = 0.0;
  double l1 = 0.0;
  double modified = 0.0;
  double variance = 0.0;
  SubsetSpec subset;
};

SmoothnessReport smoothness_report(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset);

enum class Measure { l2, l1, modified };
enum class Objective { raw, per_arm };
enum class SearchMethod { brute, prefix };

Measure parse_measure(std::string_view s);
Objective parse_objective(std::string_view s);
SearchMethod parse_search_method(std::string_view s);
std::string_view to_string(Measure m);
std::string_view to_string(Objective o);
std::string_view to_string(SearchMethod m);

struct SubsetOptimum {
  SubsetSpec subset;
  double value = 0.0;
  /// Set when the prefix scan is not known to be exact for the measure.
  bool heuristic = false;
};

inline constexpr std::size_t kMaxBruteForceSize = 22;

/// Maximizes the measure (optionally divided by N_I) over subsets I with
/// N_I >= 1. Brute force enumerates all 2^K - 1 candidates (K <= 22) and
/// breaks ties towards the lexicographically smallest index list; `workers`
/// partitions the enumeration without changing the result. The prefix scan
/// needs a monotone reward and takes complements that are top-d prefixes by
/// sqrt(mu_i (1 - mu_i)) grad_i r(mu).
SubsetOptimum maximize_over_subsets(Measure measure, Objective objective, const RewardModel& reward,
                                    const Vector& mu, SearchMethod method = SearchMethod::brute,
                                    unsigned workers = 1);

struct NormRatioOptimum {
  std::vector<std::size_t> subset;  // sorted indices
  double value = 0.0;
};

/// max over nonempty A of ||x_A||_1^2 / |A|, by scanning prefixes of |x|
/// sorted descending.
NormRatioOptimum norm_ratio_max(const Vector& x);

/// Worker count from CMABLB_WORKERS, defaulting to 1.
unsigned default_workers();

}  // namespace cmablb
