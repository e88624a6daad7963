#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace cmablb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Reward of a single action as a function of the means of its K arms.
///
/// Inputs are validated strictly: the dimension must equal `action_size()` and
/// every coordinate must lie in [0, 1]. Nothing is clamped.
class RewardModel {
 public:
  virtual ~RewardModel() = default;

  std::size_t action_size() const { return action_size_; }
  bool monotone() const { return monotone_; }
  const std::string& name() const { return name_; }

  /// True when the value depends on the multiset of means only. Instance
  /// construction refuses models that are not.
  virtual bool index_invariant() const { return true; }

  double evaluate(const Vector& mu) const;
  Vector gradient(const Vector& mu) const;

  /// Throws std::invalid_argument on a wrong dimension or out-of-range entry.
  void validate(const Vector& mu) const;

 protected:
  RewardModel(std::size_t action_size, bool monotone, std::string name);

  virtual double value_at(const Vector& mu) const = 0;
  virtual Vector gradient_at(const Vector& mu) const = 0;

 private:
  std::size_t action_size_;
  bool monotone_;
  std::string name_;

  friend class SumOfCopies;
};

using RewardPtr = std::shared_ptr<const RewardModel>;

/// r(mu) = sum_i mu_i
class LinearReward final : public RewardModel {
 public:
  explicit LinearReward(std::size_t k);

 protected:
  double value_at(const Vector& mu) const override;
  Vector gradient_at(const Vector& mu) const override;
};

/// One item of probabilistic maximum coverage: r(mu) = 1 - prod_j (1 - mu_j).
class PmcItemReward final : public RewardModel {
 public:
  explicit PmcItemReward(std::size_t k);

 protected:
  double value_at(const Vector& mu) const override;
  Vector gradient_at(const Vector& mu) const override;
};

/// r(mu) = 1 - exp(-sum_i mu_i^2)
class ExpQuadraticReward final : public RewardModel {
 public:
  explicit ExpQuadraticReward(std::size_t k);

 protected:
  double value_at(const Vector& mu) const override;
  Vector gradient_at(const Vector& mu) const override;
};

/// Weighted linear reward with weights w_i = 2^(K-i) (1-based i), so the
/// gradient is 2^(K-i) at every point. Position dependent, hence not index
/// invariant; only used by the tightness-counterexample checks.
class PowerGradientReward final : public RewardModel {
 public:
  explicit PowerGradientReward(std::size_t k);

  bool index_invariant() const override { return false; }
  const Vector& weights() const { return weights_; }

 protected:
  double value_at(const Vector& mu) const override;
  Vector gradient_at(const Vector& mu) const override;

 private:
  Vector weights_;
};

/// r~([mu_1, ..., mu_M]) = sum_i base(mu_i) over M stacked blocks of size K.
class SumOfCopies final : public RewardModel {
 public:
  SumOfCopies(RewardPtr base, std::size_t copies);

  // Blocks are not interchangeable coordinate-wise.
  bool index_invariant() const override { return base_->index_invariant() && copies_ == 1; }
  const RewardModel& base() const { return *base_; }
  std::size_t copies() const { return copies_; }

 protected:
  double value_at(const Vector& mu) const override;
  Vector gradient_at(const Vector& mu) const override;

 private:
  RewardPtr base_;
  std::size_t copies_;
};

/// Names accepted by make_reward.
const std::vector<std::string>& reward_names();

/// Builds a model by CLI name: linear, pmc-item, exp-quadratic, power-gradient.
/// With copies > 1 the model is wrapped in SumOfCopies (action size copies*k).
RewardPtr make_reward(std::string_view name, std::size_t k, std::size_t copies = 1);

/// Central differences in the interior; one-sided differences with step 1e-7
/// where mu_i -/+ h would leave [0, 1].
Vector finite_diff_gradient(const RewardModel& model, const Vector& mu, double h = 1e-5);

}  // namespace cmablb
