#pragma once

#include "cmablb/bounds.hpp"
#include "cmablb/rewards.hpp"
#include "cmablb/rng.hpp"
#include "cmablb/smoothness.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cmablb {

/// Staircase law over {0,1}^N driven by one shared uniform draw U:
/// coordinate i is 1 iff U <= q_i. Outcome k (k = 1..N+1) is the vector
/// whose first k-1 coordinates are 0, with probability q_k - q_{k-1}
/// (q_0 = 0, q_{N+1} = 1), so coordinate i has marginal q_i.
class CouplingDistribution {
 public:
  /// Thresholds must be nondecreasing within [0, 1].
  explicit CouplingDistribution(Vector thresholds);

  const Vector& thresholds() const { return q_; }
  std::size_t size() const { return static_cast<std::size_t>(q_.size()); }
  Vector outcome_probabilities() const;
  std::vector<std::uint8_t> observe(double u) const;

 private:
  Vector q_;
};

/// Sorted complement values collapsed into groups of equal value.
struct ThresholdGroups {
  Vector distinct;                       // strictly increasing
  std::vector<std::size_t> group_of;     // complement coordinate -> group
  std::vector<std::size_t> first_index;  // group -> first complement coordinate
};

ThresholdGroups group_thresholds(const Vector& sorted_values);

/// c_j = sum_{i >= j} g_i
Vector cumulative_gradient(const Vector& gradient);

/// Throws unless 0 < p_1 < ... < p_N < 1.
void require_interior_distinct(const Vector& p);

/// B = D(p) + 11^T / (1 - p_N), D_ii = 1 / (p_i - p_{i-1}), p_0 = 0.
Matrix bkl_build(const Vector& p);
/// Closed-form Sherman-Morrison inverse, which collapses to D^{-1} - d d^T
/// with d_i = p_i - p_{i-1}.
Matrix bkl_inverse(const Vector& p);

/// eps*_i = eps0 (p_i - p_{i-1}) (c_i - sum_j (p_j - p_{j-1}) c_j)
Vector epsilon_star(const Vector& p, const Vector& c, double eps0);
/// eps0 B^{-1} c via a Cholesky solve of bkl_build(p).
Vector epsilon_star_matrix_route(const Vector& p, const Vector& c, double eps0);

/// (c^T eps)^2 / (eps^T B eps)
double f_ratio(const Vector& p, const Vector& c, const Vector& eps);

/// 1/2 min{p_1, min_i (p_i - p_{i-1}), (1 - p_N) / N}. Within this radius the
/// perturbed staircase law stays a probability distribution with monotone
/// thresholds in [0, 1].
double validity_bound(const Vector& p);

/// r(p) - r(p - cumsum(eps)) with the common coordinates (profile tail)
/// unchanged. `eps` has one entry per complement coordinate.
double gap_exact(const RewardModel& reward, const SortedProfile& profile, const Vector& eps);

/// Outcome probabilities of the optimal (eps = 0) and perturbed staircase laws
/// over N+1 outcomes.
Vector staircase_probabilities(const Vector& p, const Vector& eps);

/// KL(nu, nu*) between the perturbed and unperturbed staircase laws, 0 ln 0 = 0.
double kl_exact(const Vector& p, const Vector& eps);
/// 2 eps^T B eps
double kl_quadratic_bound(const Vector& p, const Vector& eps);

struct KlComparison {
  double exact = 0.0;
  double quadratic_bound = 0.0;
  /// False when ||eps||_inf exceeds validity_bound(p); the bound is then not
  /// guaranteed but both numbers are still reported.
  bool bound_applicable = false;
};

KlComparison kl_compare(const Vector& p, const Vector& eps);

/// The eps0-indexed family eps0 * B^{-1} c built on the sorted profile of mu
/// w.r.t. a subset, after collapsing tied means into single outcomes.
class PerturbationFamily {
 public:
  PerturbationFamily(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset);

  const SortedProfile& profile() const { return profile_; }
  const ThresholdGroups& groups() const { return groups_; }
  /// Suffix sums over all complement coordinates.
  const Vector& cumulative() const { return c_full_; }
  /// Suffix sums taken at the first coordinate of each group.
  const Vector& cumulative_distinct() const { return c_distinct_; }
  /// eps* at eps0 = 1, one entry per group.
  const Vector& direction() const { return direction_; }
  double validity_radius() const { return validity_; }
  /// Largest eps0 keeping ||eps||_inf within the validity radius.
  double max_scale() const { return max_scale_; }

  Vector epsilon(double scale) const { return scale * direction_; }
  /// Expanded to complement coordinates; zero inside tied groups.
  Vector epsilon_full(double scale) const;
  double gap(double scale) const;
  double first_order_gap(double scale) const { return scale * c_distinct_.dot(direction_); }

  /// Largest eps0 (halving from max_scale) for which the gap is increasing
  /// and at least half its first-order value on a grid covering (0, eps0].
  double certified_scale() const;
  double max_gap() const { return gap(certified_scale()); }
  /// eps0 in (0, certified_scale] with gap(eps0) equal to `target` within
  /// relative 1e-6. Throws GapUnreachable when target > max_gap().
  double scale_for_gap(double target) const;

 private:
  bool certify(double scale) const;

  const RewardModel* reward_;
  SortedProfile profile_;
  ThresholdGroups groups_;
  Vector c_full_;
  Vector c_distinct_;
  Vector direction_;
  double validity_ = 0.0;
  double max_scale_ = 0.0;
  mutable std::optional<double> certified_;
};

class GapUnreachable : public std::runtime_error {
 public:
  GapUnreachable(double requested, double achievable);
  double achievable() const { return achievable_; }

 private:
  double achievable_;
};

class HorizonTooShort : public std::runtime_error {
 public:
  HorizonTooShort(double horizon, double minimum);
  double minimum() const { return minimum_; }

 private:
  double minimum_;
};

struct BoundAnnotation {
  BoundKind kind = BoundKind::dependent;
  double value = 0.0;       // DB* (per ln T) or IB*
  double smoothness = 0.0;  // modified smoothness at the chosen subset
  std::optional<double> horizon;
  std::optional<double> min_horizon;
};

/// A fully specified I-disjoint problem.
///
/// Arm layout: arms 0..|I|-1 are the common arms (means mu_I in index order);
/// action a owns arms |I| + a N .. |I| + a N + N - 1, arm j of the block
/// standing for the j-th smallest complement mean. Each action lists its
/// common arms first, then its block. Arms past the last full block are
/// unused.
struct DisjointInstance {
  std::size_t m = 0;
  std::size_t k = 0;
  SubsetSpec subset;
  Vector mu;                        // means of the optimal action, original order
  Vector mu_common;                 // mu restricted to the subset
  Vector p;                         // distinct complement thresholds
  std::vector<std::size_t> groups;  // complement coordinate -> index into p
  Vector epsilon;                   // one entry per distinct threshold
  std::vector<std::vector<std::size_t>> actions;
  std::size_t optimal_index = 0;
  double gap = 0.0;
  std::string reward_name;
  BoundAnnotation bound;

  std::size_t complement_size() const { return groups.size(); }
  std::size_t common_size() const { return static_cast<std::size_t>(mu_common.size()); }
  /// Thresholds per complement coordinate for the optimal law (p) and the
  /// perturbed law (p - cumsum(eps)).
  Vector optimal_thresholds() const;
  Vector perturbed_thresholds() const;
  /// Means of action a in profile layout (block coordinates, then common arms).
  Vector action_means(std::size_t a) const;
  /// Number of arms covered by some action.
  std::size_t used_arms() const { return common_size() + actions.size() * complement_size(); }
};

/// Checks the structural invariants; throws std::invalid_argument.
void validate_instance(const DisjointInstance& inst);

struct BuildOptions {
  /// Which action carries the optimal law; defaults to the last one.
  std::optional<std::size_t> optimal_index;
  unsigned workers = 1;
};

/// Worst-case instance for the problem-dependent bound with gap `target_gap`.
DisjointInstance build_dependent_instance(const RewardModel& reward, const Vector& mu, double target_gap,
                                          std::size_t m, const BuildOptions& options = {});

/// Worst-case instance for the problem-independent bound at horizon T, with
/// gap (gamma/8) sqrt((m - K) / (T N)).
DisjointInstance build_independent_instance(const RewardModel& reward, const Vector& mu, std::size_t m,
                                            double horizon, const BuildOptions& options = {});

/// One round of semi-bandit feedback for `action`: (arm, bit) pairs in the
/// action's arm order. One uniform draw drives the whole block; common arms
/// are independent Bernoullis.
std::vector<std::pair<std::size_t, std::uint8_t>> sample_round(const DisjointInstance& inst, Rng& rng,
                                                               std::size_t action);

}  // namespace cmablb
