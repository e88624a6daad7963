#include "cmablb/rewards.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace cmablb {

namespace {

constexpr double kBoundaryStep = 1e-7;

}  // namespace

RewardModel::RewardModel(std::size_t action_size, bool monotone, std::string name)
    : action_size_(action_size), monotone_(monotone), name_(std::move(name)) {
  if (action_size_ == 0) throw std::invalid_argument("reward action size must be positive");
}

void RewardModel::validate(const Vector& mu) const {
  if (static_cast<std::size_t>(mu.size()) != action_size_) {
    std::ostringstream msg;
    msg << name_ << ": expected " << action_size_ << " means, got " << mu.size();
    throw std::invalid_argument(msg.str());
  }
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    // Also rejects NaN.
    if (!(mu[i] >= 0.0 && mu[i] <= 1.0)) {
      std::ostringstream msg;
      msg << name_ << ": mean " << i << " = " << mu[i] << " outside [0, 1]";
      throw std::invalid_argument(msg.str());
    }
  }
}

double RewardModel::evaluate(const Vector& mu) const {
  validate(mu);
  return value_at(mu);
}

Vector RewardModel::gradient(const Vector& mu) const {
  validate(mu);
  return gradient_at(mu);
}

LinearReward::LinearReward(std::size_t k) : RewardModel(k, true, "linear") {}

double LinearReward::value_at(const Vector& mu) const { return mu.sum(); }

Vector LinearReward::gradient_at(const Vector& mu) const { return Vector::Ones(mu.size()); }

PmcItemReward::PmcItemReward(std::size_t k) : RewardModel(k, true, "pmc-item") {}

double PmcItemReward::value_at(const Vector& mu) const {
  double miss = 1.0;
  for (double m : mu) miss *= 1.0 - m;
  return 1.0 - miss;
}

Vector PmcItemReward::gradient_at(const Vector& mu) const {
  // Prefix/suffix products so that a coordinate at 1 does not poison the rest.
  const Eigen::Index k = mu.size();
  Vector grad(k);
  double prefix = 1.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    grad[i] = prefix;
    prefix *= 1.0 - mu[i];
  }
  double suffix = 1.0;
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    grad[i] *= suffix;
    suffix *= 1.0 - mu[i];
  }
  return grad;
}

ExpQuadraticReward::ExpQuadraticReward(std::size_t k) : RewardModel(k, true, "exp-quadratic") {}

double ExpQuadraticReward::value_at(const Vector& mu) const {
  return -std::expm1(-mu.squaredNorm());
}

Vector ExpQuadraticReward::gradient_at(const Vector& mu) const {
  return 2.0 * std::exp(-mu.squaredNorm()) * mu;
}

PowerGradientReward::PowerGradientReward(std::size_t k)
    : RewardModel(k, true, "power-gradient"), weights_(static_cast<Eigen::Index>(k)) {
  for (std::size_t i = 0; i < k; ++i) {
    weights_[static_cast<Eigen::Index>(i)] = std::ldexp(1.0, static_cast<int>(k - 1 - i));
  }
}

double PowerGradientReward::value_at(const Vector& mu) const { return weights_.dot(mu); }

Vector PowerGradientReward::gradient_at(const Vector&) const { return weights_; }

SumOfCopies::SumOfCopies(RewardPtr base, std::size_t copies)
    : RewardModel(base ? base->action_size() * copies : 0, base ? base->monotone() : false,
                  base ? base->name() : std::string{}),
      base_(std::move(base)),
      copies_(copies) {
  if (copies_ == 0) throw std::invalid_argument("copies must be positive");
}

double SumOfCopies::value_at(const Vector& mu) const {
  const auto k = static_cast<Eigen::Index>(base_->action_size());
  double total = 0.0;
  for (std::size_t c = 0; c < copies_; ++c) {
    total += base_->value_at(mu.segment(static_cast<Eigen::Index>(c) * k, k));
  }
  return total;
}

Vector SumOfCopies::gradient_at(const Vector& mu) const {
  const auto k = static_cast<Eigen::Index>(base_->action_size());
  Vector grad(mu.size());
  for (std::size_t c = 0; c < copies_; ++c) {
    const auto offset = static_cast<Eigen::Index>(c) * k;
    grad.segment(offset, k) = base_->gradient_at(mu.segment(offset, k));
  }
  return grad;
}

const std::vector<std::string>& reward_names() {
  static const std::vector<std::string> names{"linear", "pmc-item", "exp-quadratic",
                                              "power-gradient"};
  return names;
}

RewardPtr make_reward(std::string_view name, std::size_t k, std::size_t copies) {
  RewardPtr base;
  if (name == "linear") {
    base = std::make_shared<LinearReward>(k);
  } else if (name == "pmc-item") {
    base = std::make_shared<PmcItemReward>(k);
  } else if (name == "exp-quadratic") {
    base = std::make_shared<ExpQuadraticReward>(k);
  } else if (name == "power-gradient") {
    base = std::make_shared<PowerGradientReward>(k);
  } else {
    throw std::invalid_argument("unknown reward model '" + std::string(name) + "'");
  }
  if (copies == 0) throw std::invalid_argument("copies must be positive");
  if (copies == 1) return base;
  return std::make_shared<SumOfCopies>(std::move(base), copies);
}

Vector finite_diff_gradient(const RewardModel& model, const Vector& mu, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  model.validate(mu);
  Vector grad(mu.size());
  Vector probe = mu;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double x = mu[i];
    if (x - h >= 0.0 && x + h <= 1.0) {
      probe[i] = x + h;
      const double up = model.evaluate(probe);
      probe[i] = x - h;
      const double down = model.evaluate(probe);
      grad[i] = (up - down) / (2.0 * h);
    } else if (x + kBoundaryStep <= 1.0) {
      probe[i] = x + kBoundaryStep;
      grad[i] = (model.evaluate(probe) - model.evaluate(mu)) / kBoundaryStep;
    } else {
      probe[i] = x - kBoundaryStep;
      grad[i] = (model.evaluate(mu) - model.evaluate(probe)) / kBoundaryStep;
    }
    probe[i] = x;
  }
  return grad;
}

}  // namespace cmablb
