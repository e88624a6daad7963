#include "cmablb/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace cmablb {

namespace {

std::string fmt_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// Threshold vector of the staircase law after subtracting cumsum(eps).
Vector subtract_cumsum(const Vector& p, const Vector& eps) {
  Vector q(p.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += eps[i];
    q[i] = p[i] - acc;
  }
  return q;
}

}  // namespace

CouplingDistribution::CouplingDistribution(Vector thresholds) : q_(std::move(thresholds)) {
  double prev = 0.0;
  for (Eigen::Index i = 0; i < q_.size(); ++i) {
    if (!(q_[i] >= prev && q_[i] <= 1.0)) {
      throw std::invalid_argument("coupling thresholds must be nondecreasing in [0, 1]");
    }
    prev = q_[i];
  }
}

Vector CouplingDistribution::outcome_probabilities() const {
  Vector out(q_.size() + 1);
  double prev = 0.0;
  for (Eigen::Index i = 0; i < q_.size(); ++i) {
    out[i] = q_[i] - prev;
    prev = q_[i];
  }
  out[q_.size()] = 1.0 - prev;
  return out;
}

std::vector<std::uint8_t> CouplingDistribution::observe(double u) const {
  std::vector<std::uint8_t> x(static_cast<std::size_t>(q_.size()));
  for (Eigen::Index i = 0; i < q_.size(); ++i) x[static_cast<std::size_t>(i)] = u <= q_[i] ? 1 : 0;
  return x;
}

ThresholdGroups group_thresholds(const Vector& sorted_values) {
  ThresholdGroups g;
  std::vector<double> distinct;
  for (Eigen::Index i = 0; i < sorted_values.size(); ++i) {
    const double v = sorted_values[i];
    if (i > 0 && v < sorted_values[i - 1]) throw std::invalid_argument("threshold values must be sorted");
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      g.first_index.push_back(static_cast<std::size_t>(i));
    }
    g.group_of.push_back(distinct.size() - 1);
  }
  g.distinct = Eigen::Map<const Vector>(distinct.data(), static_cast<Eigen::Index>(distinct.size()));
  return g;
}

Vector cumulative_gradient(const Vector& gradient) {
  Vector c(gradient.size());
  double acc = 0.0;
  for (Eigen::Index i = gradient.size() - 1; i >= 0; --i) {
    acc += gradient[i];
    c[i] = acc;
  }
  return c;
}

void require_interior_distinct(const Vector& p) {
  if (p.size() == 0) throw std::invalid_argument("threshold vector is empty");
  double prev = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] > prev)) {
      throw std::invalid_argument("thresholds must satisfy 0 < p_1 < ... < p_N (violated at " + std::to_string(i) +
                                  ")");
    }
    prev = p[i];
  }
  if (!(prev < 1.0)) throw std::invalid_argument("thresholds must satisfy p_N < 1");
}

Matrix bkl_build(const Vector& p) {
  require_interior_distinct(p);
  const Eigen::Index n = p.size();
  Matrix b = Matrix::Constant(n, n, 1.0 / (1.0 - p[n - 1]));
  double prev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    b(i, i) += 1.0 / (p[i] - prev);
    prev = p[i];
  }
  return b;
}

Matrix bkl_inverse(const Vector& p) {
  require_interior_distinct(p);
  const Eigen::Index n = p.size();
  Vector d(n);
  double prev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    d[i] = p[i] - prev;
    prev = p[i];
  }
  // The rank-one coefficient (1/(1-p_N)) / (1 + p_N/(1-p_N)) equals 1.
  Matrix inv = -d * d.transpose();
  inv.diagonal() += d;
  return inv;
}

Vector epsilon_star(const Vector& p, const Vector& c, double eps0) {
  require_interior_distinct(p);
  if (c.size() != p.size()) throw std::invalid_argument("epsilon_star: c and p differ in length");
  if (c.isZero(0.0)) throw std::invalid_argument("epsilon_star: cumulative gradient is zero");
  const Eigen::Index n = p.size();
  Vector d(n);
  double prev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    d[i] = p[i] - prev;
    prev = p[i];
  }
  const double mean = d.dot(c);
  Vector eps(n);
  for (Eigen::Index i = 0; i < n; ++i) eps[i] = eps0 * d[i] * (c[i] - mean);
  return eps;
}

Vector epsilon_star_matrix_route(const Vector& p, const Vector& c, double eps0) {
  if (c.size() != p.size()) throw std::invalid_argument("epsilon_star: c and p differ in length");
  const Matrix b = bkl_build(p);
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success) throw std::runtime_error("B_KL is not positive definite");
  return eps0 * llt.solve(c);
}

double f_ratio(const Vector& p, const Vector& c, const Vector& eps) {
  if (c.size() != p.size() || eps.size() != p.size()) throw std::invalid_argument("f_ratio: length mismatch");
  if (eps.isZero(0.0)) throw std::invalid_argument("f_ratio: eps must be nonzero");
  const Matrix b = bkl_build(p);
  const double num = c.dot(eps);
  return num * num / eps.dot(b * eps);
}

double validity_bound(const Vector& p) {
  require_interior_distinct(p);
  const Eigen::Index n = p.size();
  double smallest = p[0];
  for (Eigen::Index i = 1; i < n; ++i) smallest = std::min(smallest, p[i] - p[i - 1]);
  smallest = std::min(smallest, (1.0 - p[n - 1]) / static_cast<double>(n));
  return 0.5 * smallest;
}

double gap_exact(const RewardModel& reward, const SortedProfile& profile, const Vector& eps) {
  const auto n = static_cast<Eigen::Index>(profile.complement_size);
  if (eps.size() != n) throw std::invalid_argument("gap_exact: eps length must equal the complement size");
  Vector perturbed = profile.values;
  perturbed.head(n) = subtract_cumsum(profile.values.head(n), eps);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(perturbed[i] >= 0.0 && perturbed[i] <= 1.0)) {
      throw std::invalid_argument("gap_exact: perturbed mean " + fmt_double(perturbed[i]) + " outside [0, 1]");
    }
  }
  return reward.evaluate(profile.values) - reward.evaluate(perturbed);
}

Vector staircase_probabilities(const Vector& p, const Vector& eps) {
  if (eps.size() != p.size()) throw std::invalid_argument("staircase: eps and p differ in length");
  const Eigen::Index n = p.size();
  Vector probs(n + 1);
  double prev = 0.0;
  double total_eps = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    probs[i] = p[i] - prev - eps[i];
    prev = p[i];
    total_eps += eps[i];
  }
  probs[n] = 1.0 - prev + total_eps;
  return probs;
}

double kl_exact(const Vector& p, const Vector& eps) {
  const Vector target = staircase_probabilities(p, Vector::Zero(p.size()));
  const Vector perturbed = staircase_probabilities(p, eps);
  constexpr double kSlack = 1e-12;
  double kl = 0.0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (target[i] < -kSlack || perturbed[i] < -kSlack) {
      throw std::invalid_argument("kl_exact: outcome probability " + std::to_string(i) + " is negative");
    }
    const double a = std::max(perturbed[i], 0.0);
    const double b = std::max(target[i], 0.0);
    if (a == 0.0) continue;
    if (b == 0.0) throw std::invalid_argument("kl_exact: perturbed law not absolutely continuous");
    kl += a * std::log(a / b);
  }
  return kl;
}

double kl_quadratic_bound(const Vector& p, const Vector& eps) {
  if (eps.size() != p.size()) throw std::invalid_argument("kl bound: eps and p differ in length");
  return 2.0 * eps.dot(bkl_build(p) * eps);
}

KlComparison kl_compare(const Vector& p, const Vector& eps) {
  KlComparison out;
  out.exact = kl_exact(p, eps);
  out.quadratic_bound = kl_quadratic_bound(p, eps);
  out.bound_applicable = eps.lpNorm<Eigen::Infinity>() <= validity_bound(p);
  return out;
}

PerturbationFamily::PerturbationFamily(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset)
    : reward_(&reward) {
  if (!reward.index_invariant()) {
    throw std::invalid_argument("instance construction needs an index-invariant reward ('" + reward.name() +
                                "' is not)");
  }
  reward.validate(mu);
  profile_ = sorted_profile(mu, subset);
  const auto n = static_cast<Eigen::Index>(profile_.complement_size);
  if (n == 0) throw std::invalid_argument("the subset leaves no varying arms (N_I = 0)");
  groups_ = group_thresholds(profile_.values.head(n));
  require_interior_distinct(groups_.distinct);

  c_full_ = cumulative_gradient(profile_gradient(reward, mu, profile_).head(n));
  const auto g = static_cast<Eigen::Index>(groups_.first_index.size());
  c_distinct_.resize(g);
  for (Eigen::Index j = 0; j < g; ++j) {
    c_distinct_[j] = c_full_[static_cast<Eigen::Index>(groups_.first_index[static_cast<std::size_t>(j)])];
  }
  if (c_distinct_.isZero(0.0)) throw std::invalid_argument("gradient vanishes outside the subset");

  direction_ = epsilon_star(groups_.distinct, c_distinct_, 1.0);
  validity_ = validity_bound(groups_.distinct);
  const double norm = direction_.lpNorm<Eigen::Infinity>();
  if (!(norm > 0.0)) throw std::invalid_argument("modified smoothness is zero for this subset");
  max_scale_ = validity_ / norm;
}

Vector PerturbationFamily::epsilon_full(double scale) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(profile_.complement_size));
  for (std::size_t j = 0; j < groups_.first_index.size(); ++j) {
    out[static_cast<Eigen::Index>(groups_.first_index[j])] = scale * direction_[static_cast<Eigen::Index>(j)];
  }
  return out;
}

double PerturbationFamily::gap(double scale) const { return gap_exact(*reward_, profile_, epsilon_full(scale)); }

bool PerturbationFamily::certify(double scale) const {
  constexpr int kUniform = 32;
  constexpr int kGeometric = 20;
  double prev_gap = 0.0;
  for (int j = 1; j <= kUniform; ++j) {
    const double s = scale * j / kUniform;
    const double g = gap(s);
    if (!(g > prev_gap) || g < 0.5 * first_order_gap(s)) return false;
    prev_gap = g;
  }
  for (int j = 1; j <= kGeometric; ++j) {
    const double s = std::ldexp(scale, -j);
    const double g = gap(s);
    if (!(g > 0.0) || g < 0.5 * first_order_gap(s)) return false;
  }
  return true;
}

double PerturbationFamily::certified_scale() const {
  if (certified_) return *certified_;
  double s = max_scale_;
  for (int attempt = 0; attempt < 64; ++attempt, s *= 0.5) {
    if (certify(s)) {
      certified_ = s;
      return s;
    }
  }
  throw std::runtime_error("could not certify a perturbation scale with gap >= c^T eps / 2");
}

double PerturbationFamily::scale_for_gap(double target) const {
  if (!(target > 0.0)) throw std::invalid_argument("target gap must be positive");
  const double hi_scale = certified_scale();
  const double achievable = gap(hi_scale);
  if (target > achievable) throw GapUnreachable(target, achievable);
  double lo = 0.0;
  double hi = hi_scale;
  double best = hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap(mid);
    best = mid;
    if (std::abs(g - target) <= 1e-12 * target) break;
    if (g < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-17 * hi_scale) break;
  }
  const double g = gap(best);
  if (std::abs(g - target) > 1e-6 * target) {
    throw std::runtime_error("bisection failed to match the gap: got " + fmt_double(g) + " for target " +
                             fmt_double(target));
  }
  return best;
}

GapUnreachable::GapUnreachable(double requested, double achievable)
    : std::runtime_error("gap " + fmt_double(requested) + " is unreachable within the validity bounds; largest "
                         "achievable gap is " + fmt_double(achievable)),
      achievable_(achievable) {}

HorizonTooShort::HorizonTooShort(double horizon, double minimum)
    : std::runtime_error("horizon " + fmt_double(horizon) + " is below T0 = " + fmt_double(minimum) +
                         ", the smallest horizon whose prescribed gap is achievable"),
      minimum_(minimum) {}

Vector DisjointInstance::optimal_thresholds() const {
  Vector q(static_cast<Eigen::Index>(groups.size()));
  for (std::size_t j = 0; j < groups.size(); ++j) q[static_cast<Eigen::Index>(j)] = p[static_cast<Eigen::Index>(groups[j])];
  return q;
}

Vector DisjointInstance::perturbed_thresholds() const {
  const Vector shifted = subtract_cumsum(p, epsilon);
  Vector q(static_cast<Eigen::Index>(groups.size()));
  for (std::size_t j = 0; j < groups.size(); ++j) q[static_cast<Eigen::Index>(j)] = shifted[static_cast<Eigen::Index>(groups[j])];
  return q;
}

Vector DisjointInstance::action_means(std::size_t a) const {
  if (a >= actions.size()) throw std::out_of_range("action index out of range");
  const auto n = static_cast<Eigen::Index>(complement_size());
  Vector means(n + mu_common.size());
  means.head(n) = a == optimal_index ? optimal_thresholds() : perturbed_thresholds();
  means.tail(mu_common.size()) = mu_common;
  return means;
}

void validate_instance(const DisjointInstance& inst) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid instance: " + what); };
  if (inst.k == 0 || inst.subset.action_size() != inst.k) fail("subset does not match K");
  if (static_cast<std::size_t>(inst.mu.size()) != inst.k) fail("mu must have K entries");
  const std::size_t n = inst.complement_size();
  if (n == 0 || n != inst.subset.complement_size()) fail("group map does not match N_I");
  if (static_cast<std::size_t>(inst.mu_common.size()) != inst.subset.indices().size()) fail("mu_common size");
  if (inst.p.size() != inst.epsilon.size() || inst.p.size() == 0) fail("p and epsilon differ in length");
  for (std::size_t j = 0; j < n; ++j) {
    if (inst.groups[j] >= static_cast<std::size_t>(inst.p.size())) fail("group index out of range");
    if (j > 0 && inst.groups[j] != inst.groups[j - 1] && inst.groups[j] != inst.groups[j - 1] + 1) {
      fail("groups must be contiguous and ordered");
    }
  }
  if (inst.groups.front() != 0 || inst.groups.back() + 1 != static_cast<std::size_t>(inst.p.size())) {
    fail("groups must cover every threshold");
  }
  require_interior_distinct(inst.p);
  // Perturbed law must be a valid staircase law.
  CouplingDistribution(inst.perturbed_thresholds());
  const Vector probs = staircase_probabilities(inst.p, inst.epsilon);
  if (probs.minCoeff() < 0.0) fail("perturbed outcome probabilities must be nonnegative");

  const std::size_t common = inst.common_size();
  if (inst.m < inst.k) fail("m must be at least K");
  const std::size_t expected_actions = (inst.m - common) / n;
  if (inst.actions.size() != expected_actions || expected_actions < 2) fail("wrong number of actions");
  if (static_cast<double>(inst.actions.size()) < static_cast<double>(inst.m - inst.k) / static_cast<double>(n)) {
    fail("fewer than (m - K) / N_I actions");
  }
  if (inst.optimal_index >= inst.actions.size()) fail("optimal_index out of range");
  std::vector<int> owner(inst.m, -1);
  for (std::size_t a = 0; a < inst.actions.size(); ++a) {
    const auto& act = inst.actions[a];
    if (act.size() != inst.k) fail("action " + std::to_string(a) + " does not have K arms");
    for (std::size_t j = 0; j < act.size(); ++j) {
      const std::size_t arm = act[j];
      if (arm >= inst.m) fail("arm id out of range");
      if (j < common) {
        if (arm != j) fail("common arms must lead every action");
        continue;
      }
      if (arm < common) fail("common arm repeated in a block");
      if (owner[arm] != -1) fail("arm " + std::to_string(arm) + " shared outside the common set");
      owner[arm] = static_cast<int>(a);
    }
  }
  if (!(inst.gap > 0.0)) fail("gap must be positive");
}

namespace {

DisjointInstance assemble(const RewardModel& reward, const PerturbationFamily& family, const SubsetSpec& subset,
                          const Vector& mu, std::size_t m, double scale, std::optional<std::size_t> optimal) {
  DisjointInstance inst;
  inst.m = m;
  inst.k = static_cast<std::size_t>(mu.size());
  inst.subset = subset;
  inst.mu = mu;
  const auto& common = subset.indices();
  inst.mu_common.resize(static_cast<Eigen::Index>(common.size()));
  for (std::size_t i = 0; i < common.size(); ++i) {
    inst.mu_common[static_cast<Eigen::Index>(i)] = mu[static_cast<Eigen::Index>(common[i])];
  }
  inst.p = family.groups().distinct;
  inst.groups = family.groups().group_of;
  inst.epsilon = family.epsilon(scale);
  const std::size_t n = inst.complement_size();
  const std::size_t count = (m - common.size()) / n;
  for (std::size_t a = 0; a < count; ++a) {
    std::vector<std::size_t> arms;
    arms.reserve(inst.k);
    for (std::size_t i = 0; i < common.size(); ++i) arms.push_back(i);
    for (std::size_t j = 0; j < n; ++j) arms.push_back(common.size() + a * n + j);
    inst.actions.push_back(std::move(arms));
  }
  inst.optimal_index = optimal.value_or(count - 1);
  if (inst.optimal_index >= count) throw std::invalid_argument("optimal_index out of range");
  inst.reward_name = reward.name();
  inst.gap = family.gap(scale);
  return inst;
}

}  // namespace

DisjointInstance build_dependent_instance(const RewardModel& reward, const Vector& mu, double target_gap,
                                          std::size_t m, const BuildOptions& options) {
  reward.validate(mu);
  const std::size_t k = static_cast<std::size_t>(mu.size());
  if (!(target_gap > 0.0)) throw std::invalid_argument("gap must be strictly positive");
  if (m <= 2 * k) throw std::invalid_argument("m must exceed 2K = " + std::to_string(2 * k));
  const BoundReport bound = dependent_bound(reward, mu, m, target_gap, options.workers);
  if (!(bound.smoothness > 0.0)) throw std::invalid_argument("modified smoothness is zero for every subset");
  const SubsetSpec& subset = bound.maximizing_subset;
  const PerturbationFamily family(reward, mu, subset);
  const double scale = family.scale_for_gap(target_gap);
  DisjointInstance inst = assemble(reward, family, subset, mu, m, scale, options.optimal_index);
  inst.bound.kind = BoundKind::dependent;
  inst.bound.value = bound.value;
  inst.bound.smoothness = bound.smoothness;
  validate_instance(inst);
  return inst;
}

DisjointInstance build_independent_instance(const RewardModel& reward, const Vector& mu, std::size_t m,
                                            double horizon, const BuildOptions& options) {
  reward.validate(mu);
  const std::size_t k = static_cast<std::size_t>(mu.size());
  if (m < 3 * k) throw std::invalid_argument("m must be at least 3K = " + std::to_string(3 * k));
  if (!(horizon >= 1.0)) throw std::invalid_argument("horizon must be at least 1");
  const BoundReport bound = independent_bound(reward, mu, m, horizon, options.workers);
  if (!(bound.smoothness > 0.0)) throw std::invalid_argument("modified smoothness is zero for every subset");
  const SubsetSpec& subset = bound.maximizing_subset;
  const double n = static_cast<double>(subset.complement_size());
  const double spread = static_cast<double>(m - k);
  const PerturbationFamily family(reward, mu, subset);

  auto prescribed = [&](double t) { return std::sqrt(bound.smoothness) / 8.0 * std::sqrt(spread / (t * n)); };
  const double achievable = family.max_gap();
  double t0 = std::max(1.0, std::ceil(bound.smoothness * spread / (64.0 * n * achievable * achievable)));
  while (prescribed(t0) > achievable) t0 += 1.0;
  if (horizon < t0) throw HorizonTooShort(horizon, t0);

  const double scale = family.scale_for_gap(prescribed(horizon));
  DisjointInstance inst = assemble(reward, family, subset, mu, m, scale, options.optimal_index);
  inst.bound.kind = BoundKind::independent;
  inst.bound.value = bound.value;
  inst.bound.smoothness = bound.smoothness;
  inst.bound.horizon = horizon;
  inst.bound.min_horizon = t0;
  validate_instance(inst);
  return inst;
}

std::vector<std::pair<std::size_t, std::uint8_t>> sample_round(const DisjointInstance& inst, Rng& rng,
                                                               std::size_t action) {
  if (action >= inst.actions.size()) throw std::out_of_range("action index out of range");
  const auto& arms = inst.actions[action];
  const std::size_t common = inst.common_size();
  std::vector<std::pair<std::size_t, std::uint8_t>> obs;
  obs.reserve(arms.size());
  for (std::size_t i = 0; i < common; ++i) {
    obs.emplace_back(arms[i], rng.bernoulli(inst.mu_common[static_cast<Eigen::Index>(i)]) ? 1 : 0);
  }
  const double u = rng.uniform();
  const Vector q = action == inst.optimal_index ? inst.optimal_thresholds() : inst.perturbed_thresholds();
  for (std::size_t j = 0; j < inst.complement_size(); ++j) {
    obs.emplace_back(arms[common + j], u <= q[static_cast<Eigen::Index>(j)] ? 1 : 0);
  }
  return obs;
}

}  // namespace cmablb
