#include "cmablb/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace cmablb {

SubsetSpec::SubsetSpec(std::size_t k, std::vector<std::size_t> indices)
    : k_(k), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("subset indices must be distinct");
  }
  if (!indices_.empty() && indices_.back() >= k_) {
    throw std::invalid_argument("subset index " + std::to_string(indices_.back()) +
                                " out of range for action size " + std::to_string(k_));
  }
}

SubsetSpec SubsetSpec::from_mask(std::size_t k, std::uint64_t mask) {
  if (k > 63) throw std::invalid_argument("mask subsets need k <= 63");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < k; ++i) {
    if (mask >> i & 1U) idx.push_back(i);
  }
  if (k < 64 && (mask >> k) != 0) throw std::invalid_argument("mask has bits beyond k");
  return SubsetSpec(k, std::move(idx));
}

bool SubsetSpec::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

std::vector<std::size_t> SubsetSpec::complement() const {
  std::vector<std::size_t> out;
  out.reserve(complement_size());
  for (std::size_t i = 0; i < k_; ++i) {
    if (!contains(i)) out.push_back(i);
  }
  return out;
}

namespace {

void check_dimension(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset) {
  reward.validate(mu);
  if (subset.action_size() != static_cast<std::size_t>(mu.size())) {
    throw std::invalid_argument("subset action size " + std::to_string(subset.action_size()) +
                                " does not match mean vector of size " + std::to_string(mu.size()));
  }
}

// Modified smoothness on a sorted complement: diagonal terms plus cross terms
// 2 p_i (1 - p_j) g_i g_j for i < j, with the inner sum accumulated backwards.
double modified_on_profile(const double* p, const double* g, std::size_t n) {
  double diag = 0.0;
  double cross = 0.0;
  double tail = 0.0;  // sum_{j > i} (1 - p_j) g_j
  for (std::size_t r = n; r-- > 0;) {
    diag += p[r] * (1.0 - p[r]) * g[r] * g[r];
    cross += p[r] * g[r] * tail;
    tail += (1.0 - p[r]) * g[r];
  }
  return diag + 2.0 * cross;
}

double variance_on_profile(const Vector& p, const Vector& g) {
  const Eigen::Index n = p.size();
  double second = 0.0;
  double first = 0.0;
  double c = g.sum();  // c_1, decremented as we move right
  double prev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = p[i] - prev;
    second += w * c * c;
    first += w * c;
    c -= g[i];
    prev = p[i];
  }
  return second - first * first;
}

}  // namespace

SortedProfile sorted_profile(const Vector& mu, const SubsetSpec& subset) {
  if (subset.action_size() != static_cast<std::size_t>(mu.size())) {
    throw std::invalid_argument("subset action size does not match mean vector");
  }
  SortedProfile out;
  out.permutation = subset.complement();
  out.complement_size = out.permutation.size();
  std::stable_sort(out.permutation.begin(), out.permutation.end(),
                   [&](std::size_t a, std::size_t b) { return mu[static_cast<Eigen::Index>(a)] < mu[static_cast<Eigen::Index>(b)]; });
  out.permutation.insert(out.permutation.end(), subset.indices().begin(), subset.indices().end());
  out.values.resize(mu.size());
  for (std::size_t j = 0; j < out.permutation.size(); ++j) {
    out.values[static_cast<Eigen::Index>(j)] = mu[static_cast<Eigen::Index>(out.permutation[j])];
  }
  return out;
}

Vector profile_gradient(const RewardModel& reward, const Vector& mu, const SortedProfile& profile) {
  const Vector g = reward.gradient(mu);
  Vector out(g.size());
  for (std::size_t j = 0; j < profile.permutation.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = g[static_cast<Eigen::Index>(profile.permutation[j])];
  }
  return out;
}

double gini_l2(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset) {
  check_dimension(reward, mu, subset);
  const Vector g = reward.gradient(mu);
  double total = 0.0;
  for (std::size_t i : subset.complement()) {
    const auto e = static_cast<Eigen::Index>(i);
    total += mu[e] * (1.0 - mu[e]) * g[e] * g[e];
  }
  return total;
}

double gini_l2_profile(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset) {
  check_dimension(reward, mu, subset);
  const SortedProfile prof = sorted_profile(mu, subset);
  const Vector g = reward.gradient(prof.values);
  double total = 0.0;
  for (std::size_t j = 0; j < prof.complement_size; ++j) {
    const auto e = static_cast<Eigen::Index>(j);
    total += prof.values[e] * (1.0 - prof.values[e]) * g[e] * g[e];
  }
  return total;
}

double gini_l1(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset) {
  check_dimension(reward, mu, subset);
  const Vector g = reward.gradient(mu);
  double total = 0.0;
  for (std::size_t i : subset.complement()) {
    const auto e = static_cast<Eigen::Index>(i);
    total += std::sqrt(mu[e] * (1.0 - mu[e])) * g[e];
  }
  return total * total;
}

double gini_modified(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset) {
  check_dimension(reward, mu, subset);
  const SortedProfile prof = sorted_profile(mu, subset);
  const Vector g = profile_gradient(reward, mu, prof);
  return modified_on_profile(prof.values.data(), g.data(), prof.complement_size);
}

double variance_form(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset) {
  check_dimension(reward, mu, subset);
  const SortedProfile prof = sorted_profile(mu, subset);
  const Vector g = profile_gradient(reward, mu, prof);
  const auto n = static_cast<Eigen::Index>(prof.complement_size);
  return variance_on_profile(prof.values.head(n), g.head(n));
}

double modified_l1_relation_rhs(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset) {
  check_dimension(reward, mu, subset);
  const std::size_t n = subset.complement_size();
  if (n == 0) return 0.0;
  const SortedProfile prof = sorted_profile(mu, subset);
  const double first = prof.values[0];
  const double last = prof.values[static_cast<Eigen::Index>(n - 1)];
  if (first <= 0.0 || last >= 1.0) return 0.0;
  return gini_l1(reward, mu, subset) / (3.0 + std::log(1.0 / first) + std::log(1.0 / (1.0 - last)));
}

SmoothnessReport smoothness_report(const RewardModel& reward, const Vector& mu, const SubsetSpec& subset) {
  SmoothnessReport r;
  r.l2 = gini_l2(reward, mu, subset);
  r.l1 = gini_l1(reward, mu, subset);
  r.modified = gini_modified(reward, mu, subset);
  r.variance = variance_form(reward, mu, subset);
  r.subset = subset;
  return r;
}

Measure parse_measure(std::string_view s) {
  if (s == "l2") return Measure::l2;
  if (s == "l1") return Measure::l1;
  if (s == "modified") return Measure::modified;
  throw std::invalid_argument("unknown measure '" + std::string(s) + "'");
}

Objective parse_objective(std::string_view s) {
  if (s == "raw") return Objective::raw;
  if (s == "per-arm") return Objective::per_arm;
  throw std::invalid_argument("unknown objective '" + std::string(s) + "'");
}

SearchMethod parse_search_method(std::string_view s) {
  if (s == "brute") return SearchMethod::brute;
  if (s == "prefix") return SearchMethod::prefix;
  throw std::invalid_argument("unknown search method '" + std::string(s) + "'");
}

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::l2: return "l2";
    case Measure::l1: return "l1";
    case Measure::modified: return "modified";
  }
  return "?";
}

std::string_view to_string(Objective o) { return o == Objective::raw ? "raw" : "per-arm"; }

std::string_view to_string(SearchMethod m) { return m == SearchMethod::brute ? "brute" : "prefix"; }

namespace {

// Evaluates a measure on one complement, given in ascending-mean order.
class SubsetEvaluator {
 public:
  SubsetEvaluator(Measure measure, Objective objective, const Vector& mu, const Vector& grad)
      : measure_(measure), objective_(objective), mu_(mu), grad_(grad) {
    p_.reserve(static_cast<std::size_t>(mu.size()));
    g_.reserve(static_cast<std::size_t>(mu.size()));
  }

  double operator()(const std::vector<std::size_t>& sorted_complement) {
    p_.clear();
    g_.clear();
    for (std::size_t i : sorted_complement) {
      p_.push_back(mu_[static_cast<Eigen::Index>(i)]);
      g_.push_back(grad_[static_cast<Eigen::Index>(i)]);
    }
    const std::size_t n = p_.size();
    double value = 0.0;
    switch (measure_) {
      case Measure::l2:
        for (std::size_t j = 0; j < n; ++j) value += p_[j] * (1.0 - p_[j]) * g_[j] * g_[j];
        break;
      case Measure::l1: {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::sqrt(p_[j] * (1.0 - p_[j])) * g_[j];
        value = s * s;
        break;
      }
      case Measure::modified:
        value = modified_on_profile(p_.data(), g_.data(), n);
        break;
    }
    return objective_ == Objective::per_arm ? value / static_cast<double>(n) : value;
  }

 private:
  Measure measure_;
  Objective objective_;
  const Vector& mu_;
  const Vector& grad_;
  std::vector<double> p_;
  std::vector<double> g_;
};

bool better(double value, const std::vector<std::size_t>& subset, double best_value,
            const std::vector<std::size_t>& best_subset, bool have_best) {
  if (!have_best) return true;
  if (value > best_value) return true;
  if (value < best_value) return false;
  return std::lexicographical_compare(subset.begin(), subset.end(), best_subset.begin(), best_subset.end());
}

struct Candidate {
  std::vector<std::size_t> subset;
  double value = -std::numeric_limits<double>::infinity();
  bool valid = false;
};

Candidate brute_range(Measure measure, Objective objective, const Vector& mu, const Vector& grad,
                      const std::vector<std::size_t>& order, std::uint64_t begin, std::uint64_t end) {
  const std::size_t k = order.size();
  const std::uint64_t full = (std::uint64_t{1} << k) - 1;
  SubsetEvaluator eval(measure, objective, mu, grad);
  Candidate best;
  std::vector<std::size_t> comp;
  std::vector<std::size_t> subset;
  comp.reserve(k);
  subset.reserve(k);
  for (std::uint64_t mask = begin; mask < end; ++mask) {
    if (mask == full) continue;  // N_I = 0
    comp.clear();
    for (std::size_t i : order) {
      if (!(mask >> i & 1U)) comp.push_back(i);
    }
    const double v = eval(comp);
    if (!(v >= best.value) && best.valid) continue;
    subset.clear();
    for (std::size_t i = 0; i < k; ++i) {
      if (mask >> i & 1U) subset.push_back(i);
    }
    if (better(v, subset, best.value, best.subset, best.valid)) {
      best.value = v;
      best.subset = subset;
      best.valid = true;
    }
  }
  return best;
}

}  // namespace

SubsetOptimum maximize_over_subsets(Measure measure, Objective objective, const RewardModel& reward,
                                    const Vector& mu, SearchMethod method, unsigned workers) {
  reward.validate(mu);
  const auto k = static_cast<std::size_t>(mu.size());
  const Vector grad = reward.gradient(mu);

  // Ascending-mean order of all coordinates; every complement is a
  // subsequence of it, which matches the stable sort in sorted_profile.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mu[static_cast<Eigen::Index>(a)] < mu[static_cast<Eigen::Index>(b)];
  });

  if (method == SearchMethod::brute) {
    if (k > kMaxBruteForceSize) {
      throw std::invalid_argument("brute-force subset search needs K <= " +
                                  std::to_string(kMaxBruteForceSize) + ", got " + std::to_string(k));
    }
    const std::uint64_t total = std::uint64_t{1} << k;
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(total, 64))));
    std::vector<Candidate> parts(workers);
    if (workers == 1) {
      parts[0] = brute_range(measure, objective, mu, grad, order, 0, total);
    } else {
      std::vector<std::thread> threads;
      const std::uint64_t chunk = (total + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t b = std::min(total, w * chunk);
        const std::uint64_t e = std::min(total, b + chunk);
        threads.emplace_back([&, w, b, e] { parts[w] = brute_range(measure, objective, mu, grad, order, b, e); });
      }
      for (auto& t : threads) t.join();
    }
    Candidate best;
    for (const auto& c : parts) {
      if (c.valid && better(c.value, c.subset, best.value, best.subset, best.valid)) best = c;
    }
    return {SubsetSpec(k, best.subset), best.value, false};
  }

  if (!reward.monotone()) {
    throw std::invalid_argument("prefix subset search requires a monotone reward");
  }
  std::vector<std::size_t> by_weight(k);
  std::iota(by_weight.begin(), by_weight.end(), std::size_t{0});
  auto weight = [&](std::size_t i) {
    const auto e = static_cast<Eigen::Index>(i);
    return std::sqrt(mu[e] * (1.0 - mu[e])) * grad[e];
  };
  std::stable_sort(by_weight.begin(), by_weight.end(),
                   [&](std::size_t a, std::size_t b) { return weight(a) > weight(b); });

  SubsetEvaluator eval(measure, objective, mu, grad);
  Candidate best;
  std::vector<char> in_complement(k, 0);
  for (std::size_t d = 1; d <= k; ++d) {
    in_complement[by_weight[d - 1]] = 1;
    std::vector<std::size_t> comp;
    std::vector<std::size_t> subset;
    for (std::size_t i : order) {
      if (in_complement[i]) comp.push_back(i);
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (!in_complement[i]) subset.push_back(i);
    }
    const double v = eval(comp);
    if (better(v, subset, best.value, best.subset, best.valid)) {
      best.value = v;
      best.subset = std::move(subset);
      best.valid = true;
    }
  }
  return {SubsetSpec(k, best.subset), best.value, measure == Measure::modified};
}

NormRatioOptimum norm_ratio_max(const Vector& x) {
  if (x.size() == 0) throw std::invalid_argument("norm_ratio_max needs a nonempty vector");
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(x[static_cast<Eigen::Index>(a)]) > std::abs(x[static_cast<Eigen::Index>(b)]);
  });
  double prefix = 0.0;
  double best = -1.0;
  std::size_t best_d = 1;
  for (std::size_t d = 1; d <= n; ++d) {
    prefix += std::abs(x[static_cast<Eigen::Index>(order[d - 1])]);
    const double v = prefix * prefix / static_cast<double>(d);
    if (v > best) {
      best = v;
      best_d = d;
    }
  }
  NormRatioOptimum out;
  out.subset.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_d));
  std::sort(out.subset.begin(), out.subset.end());
  out.value = best;
  return out;
}

unsigned default_workers() {
  if (const char* env = std::getenv("CMABLB_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace cmablb
