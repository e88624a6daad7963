#include "cmablb/verify.hpp"

#include "cmablb/bounds.hpp"
#include "cmablb/instance.hpp"
#include "cmablb/io.hpp"
#include "cmablb/rng.hpp"
#include "cmablb/sim.hpp"
#include "cmablb/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace cmablb {

OscillatingReward::OscillatingReward(std::size_t k) : RewardModel(k, false, "oscillating") {}

double OscillatingReward::value_at(const Vector& mu) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) s += std::sin(2.0 * std::numbers::pi * mu[i]);
  return s / (2.0 * std::numbers::pi);
}

Vector OscillatingReward::gradient_at(const Vector& mu) const {
  Vector g(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) g[i] = std::cos(2.0 * std::numbers::pi * mu[i]);
  return g;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

std::uint64_t suite_key(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Ctx {
  std::uint64_t seed;
  std::size_t trials;
  std::uint64_t base;
  std::vector<CheckResult>* out;

  Rng trial(std::uint64_t i) const { return Rng::stream(base, i); }

  void at_most(std::string name, double measured, double threshold) const {
    out->push_back({std::move(name), measured <= threshold, measured, threshold, seed});
  }
  void at_least(std::string name, double measured, double threshold) const {
    out->push_back({std::move(name), measured >= threshold, measured, threshold, seed});
  }
};

Vector random_mu(Rng& rng, std::size_t k, double lo = 0.01, double hi = 0.99) {
  Vector mu(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) mu[static_cast<Eigen::Index>(i)] = rng.uniform(lo, hi);
  return mu;
}

SubsetSpec random_subset(Rng& rng, std::size_t k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < k; ++i) {
    if (rng.bernoulli(0.5)) idx.push_back(i);
  }
  if (idx.size() == k) idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(rng.below(k)));
  return SubsetSpec(k, idx);
}

std::size_t random_size(Rng& rng, std::size_t max_k) { return 1 + static_cast<std::size_t>(rng.below(max_k)); }

const std::vector<std::string>& monotone_models() {
  static const std::vector<std::string> names = {"linear", "pmc-item", "exp-quadratic"};
  return names;
}

RewardPtr random_monotone(Rng& rng, std::size_t k) {
  return make_reward(monotone_models()[rng.below(monotone_models().size())], k);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Independent subset-enumeration oracle for the norm ratio.
double norm_ratio_brute(const Vector& x) {
  const auto n = static_cast<std::size_t>(x.size());
  double best = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double s = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        s += std::abs(x[static_cast<Eigen::Index>(i)]);
        ++count;
      }
    }
    best = std::max(best, s * s / count);
  }
  return best;
}

void suite_gradients(const Ctx& ctx) {
  std::uint64_t trial = 0;
  for (const std::string& name : reward_names()) {
    double worst = 0.0;
    double min_grad = std::numeric_limits<double>::infinity();
    double sym = 0.0;
    bool monotone = false;
    bool symmetric = false;
    for (std::size_t t = 0; t < ctx.trials; ++t, ++trial) {
      Rng rng = ctx.trial(trial);
      const std::size_t k = random_size(rng, 8);
      const RewardPtr r = make_reward(name, k);
      monotone = r->monotone();
      symmetric = r->index_invariant();
      const Vector mu = random_mu(rng, k, 0.001, 0.999);
      const Vector g = r->gradient(mu);
      const Vector fd = finite_diff_gradient(*r, mu);
      worst = std::max(worst, (g - fd).lpNorm<Eigen::Infinity>() / (1.0 + g.lpNorm<Eigen::Infinity>()));
      min_grad = std::min(min_grad, g.minCoeff());
      if (symmetric) {
        std::vector<std::size_t> perm(k);
        for (std::size_t i = 0; i < k; ++i) perm[i] = i;
        for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        Vector permuted(mu.size());
        for (std::size_t i = 0; i < k; ++i) permuted[static_cast<Eigen::Index>(i)] = mu[static_cast<Eigen::Index>(perm[i])];
        const Vector gp = r->gradient(permuted);
        double d = rel_err(r->evaluate(permuted), r->evaluate(mu));
        for (std::size_t i = 0; i < k; ++i) {
          d = std::max(d, rel_err(gp[static_cast<Eigen::Index>(i)], g[static_cast<Eigen::Index>(perm[i])]));
        }
        sym = std::max(sym, d);
      }
    }
    ctx.at_most("gradient-vs-finite-difference/" + name, worst, 1e-5);
    if (monotone) ctx.at_least("monotone-gradient/" + name, min_grad, -1e-12);
    if (symmetric) ctx.at_most("permutation-symmetry/" + name, sym, 1e-12);
  }

  double copies_err = 0.0;
  for (std::size_t t = 0; t < ctx.trials / 10 + 1; ++t, ++trial) {
    Rng rng = ctx.trial(trial);
    const std::size_t k = random_size(rng, 4);
    const std::size_t m = random_size(rng, 4);
    const RewardPtr base = make_reward(monotone_models()[rng.below(3)], k);
    const RewardPtr sum = make_reward(base->name(), k, m);
    const Vector mu = random_mu(rng, k * m);
    double value = 0.0;
    Vector grad(mu.size());
    for (std::size_t c = 0; c < m; ++c) {
      const Vector block = mu.segment(static_cast<Eigen::Index>(c * k), static_cast<Eigen::Index>(k));
      value += base->evaluate(block);
      grad.segment(static_cast<Eigen::Index>(c * k), static_cast<Eigen::Index>(k)) = base->gradient(block);
    }
    copies_err = std::max({copies_err, rel_err(sum->evaluate(mu), value),
                           (sum->gradient(mu) - grad).lpNorm<Eigen::Infinity>()});
  }
  ctx.at_most("sum-of-copies-blocks", copies_err, 1e-12);
}

void suite_kl_bound(const Ctx& ctx) {
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  for (std::size_t t = 0; t < ctx.trials; ++t) {
    Rng rng = ctx.trial(t);
    const std::size_t n = random_size(rng, 8);
    Vector p = random_mu(rng, n);
    std::sort(p.data(), p.data() + p.size());
    try {
      require_interior_distinct(p);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const double b = validity_bound(p);
    Vector eps(p.size());
    const bool corner = t % 4 == 0;
    for (Eigen::Index i = 0; i < eps.size(); ++i) {
      eps[i] = corner ? (rng.bernoulli(0.5) ? b : -b) : rng.uniform(-b, b);
    }
    const KlComparison kl = kl_compare(p, eps);
    if (!kl.bound_applicable || !(kl.exact <= kl.quadratic_bound)) ++violations;
    if (kl.quadratic_bound > 0.0) worst_ratio = std::max(worst_ratio, kl.exact / kl.quadratic_bound);
  }
  ctx.at_most("kl-exact-within-quadratic-bound/violations", static_cast<double>(violations), 0.0);
  ctx.at_most("kl-exact-over-bound/max", worst_ratio, 1.0);

  Vector p(2);
  p << 0.25, 0.5;
  Vector eps(2);
  eps << 0.01, 0.01;
  const KlComparison kl = kl_compare(p, eps);
  ctx.at_most("worked-example/quadratic-bound", std::abs(kl.quadratic_bound - 0.0032), 1e-15);
  const double expected = 2 * 0.24 * std::log(0.24 / 0.25) + 0.52 * std::log(0.52 / 0.5);
  ctx.at_most("worked-example/kl-exact", std::abs(kl.exact - expected), 1e-15);
  ctx.at_most("kl-at-zero-eps", std::abs(kl_exact(p, Vector::Zero(2))), 0.0);
}

void suite_gap_first_order(const Ctx& ctx) {
  std::size_t violations = 0;
  std::size_t errors = 0;
  double linear_err = 0.0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < ctx.trials; ++t) {
    Rng rng = ctx.trial(t);
    const std::size_t k = random_size(rng, 8);
    const RewardPtr r = random_monotone(rng, k);
    const Vector mu = random_mu(rng, k);
    const SubsetSpec subset = random_subset(rng, k);
    try {
      const PerturbationFamily fam(*r, mu, subset);
      const double scale = fam.certified_scale() * (1.0 - rng.uniform());
      const double gap = fam.gap(scale);
      const double first = fam.first_order_gap(scale);
      if (!(gap > 0.0) || gap < 0.5 * first) ++violations;
      worst_ratio = std::min(worst_ratio, gap / first);
      if (r->name() == "linear") linear_err = std::max(linear_err, std::abs(gap - first));
    } catch (const std::exception&) {
      ++errors;
    }
  }
  ctx.at_most("gap-at-least-half-first-order/violations", static_cast<double>(violations), 0.0);
  ctx.at_least("gap-over-first-order/min", worst_ratio, 0.5);
  ctx.at_most("construction-errors", static_cast<double>(errors), 0.0);
  ctx.at_most("linear-gap-equals-first-order", linear_err, 1e-12);
}

void suite_eps_star(const Ctx& ctx) {
  double eps_err = 0.0, f_err = 0.0, inv_err = 0.0, var_err = 0.0, l2_sides = 0.0;
  double min_modified = std::numeric_limits<double>::infinity();
  double dominance = std::numeric_limits<double>::infinity();
  double rayleigh = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < ctx.trials; ++t) {
    Rng rng = ctx.trial(t);
    const std::size_t k = random_size(rng, 8);
    const RewardPtr r = random_monotone(rng, k);
    const Vector mu = random_mu(rng, k);
    const SubsetSpec subset = random_subset(rng, k);
    const PerturbationFamily fam(*r, mu, subset);
    const Vector& p = fam.groups().distinct;
    const Vector& c = fam.cumulative_distinct();
    const Vector closed = epsilon_star(p, c, 1.0);
    const Vector matrix = epsilon_star_matrix_route(p, c, 1.0);
    eps_err = std::max(eps_err, (closed - matrix).lpNorm<Eigen::Infinity>());
    const double modified = gini_modified(*r, mu, subset);
    const double f_star = f_ratio(p, c, closed);
    f_err = std::max(f_err, std::abs(f_star - modified));
    const Matrix id = bkl_build(p) * bkl_inverse(p);
    inv_err = std::max(inv_err, (id - Matrix::Identity(p.size(), p.size())).lpNorm<Eigen::Infinity>());
    var_err = std::max(var_err, std::abs(modified - variance_form(*r, mu, subset)));
    min_modified = std::min(min_modified, modified);
    dominance = std::min(dominance, modified - gini_l2(*r, mu, subset));
    l2_sides = std::max(l2_sides, std::abs(gini_l2(*r, mu, subset) - gini_l2_profile(*r, mu, subset)));
    Vector probe(p.size());
    for (Eigen::Index i = 0; i < probe.size(); ++i) probe[i] = rng.uniform(-1.0, 1.0);
    rayleigh = std::max(rayleigh, (f_ratio(p, c, probe) - f_star) / std::max(1.0, f_star));

    const OscillatingReward wave(k);
    min_modified = std::min(min_modified, gini_modified(wave, mu, subset));
    var_err = std::max(var_err, std::abs(gini_modified(wave, mu, subset) - variance_form(wave, mu, subset)));
  }
  ctx.at_most("closed-form-vs-matrix-route-eps", eps_err, 1e-10);
  ctx.at_most("f-ratio-at-eps-star-vs-modified", f_err, 1e-9);
  ctx.at_most("bkl-times-inverse-minus-identity", inv_err, 1e-9);
  ctx.at_most("modified-vs-variance-form", var_err, 1e-10);
  ctx.at_least("modified-nonnegative/min", min_modified, -1e-12);
  ctx.at_least("modified-minus-l2-monotone/min", dominance, -1e-12);
  ctx.at_most("l2-index-invariance", l2_sides, 1e-12);
  ctx.at_most("eps-star-maximizes-ratio", rayleigh, 1e-10);

  Vector p(2);
  p << 0.25, 0.5;
  const LinearReward lin(2);
  const Vector c = cumulative_gradient(Vector::Ones(2));
  Vector expected(2);
  expected << 0.3125, 0.0625;
  ctx.at_most("worked-example/eps-star", (epsilon_star(p, c, 1.0) - expected).lpNorm<Eigen::Infinity>(), 1e-15);
  ctx.at_most("worked-example/f-ratio", std::abs(f_ratio(p, c, expected) - 0.6875), 1e-14);
}

void suite_modified_vs_l1(const Ctx& ctx) {
  std::size_t violations = 0;
  double l1_l2 = std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < ctx.trials; ++t) {
    Rng rng = ctx.trial(t);
    const std::size_t k = random_size(rng, 8);
    const bool wave = t % 2 == 1;
    const RewardPtr r = wave ? std::make_shared<OscillatingReward>(k) : random_monotone(rng, k);
    const Vector mu = random_mu(rng, k, 0.001, 0.999);
    const SubsetSpec subset = random_subset(rng, k);
    const double modified = gini_modified(*r, mu, subset);
    const double rhs = modified_l1_relation_rhs(*r, mu, subset);
    if (modified < rhs * (1.0 - 1e-12)) ++violations;
    if (rhs > 0.0) margin = std::min(margin, modified / rhs);
    if (!wave) l1_l2 = std::min(l1_l2, gini_l1(*r, mu, subset) - gini_l2(*r, mu, subset));
  }
  ctx.at_most("modified-at-least-l1-over-log-factor/violations", static_cast<double>(violations), 0.0);
  ctx.at_least("modified-over-rhs/min", margin, 1.0 - 1e-12);
  ctx.at_least("l1-minus-l2-monotone/min", l1_l2, -1e-12);
}

void suite_per_arm_vs_l2(const Ctx& ctx) {
  double l1_margin = std::numeric_limits<double>::infinity();
  double modified_margin = std::numeric_limits<double>::infinity();
  double bound_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < ctx.trials; ++t) {
    Rng rng = ctx.trial(t);
    const std::size_t k = random_size(rng, 8);
    const RewardPtr r = random_monotone(rng, k);
    const Vector mu = random_mu(rng, k, 0.001, 0.999);
    const double kd = static_cast<double>(k);
    const double l2 = gini_l2(*r, mu, SubsetSpec::empty(k));
    if (!(l2 > 0.0)) continue;
    const double best_l1 = maximize_over_subsets(Measure::l1, Objective::per_arm, *r, mu).value;
    l1_margin = std::min(l1_margin, best_l1 * (1.0 + std::log(kd)) / l2);
    const double logs = 3.0 + std::log(1.0 / mu.minCoeff()) + std::log(1.0 / (1.0 - mu.maxCoeff()));
    const double best_mod = maximize_over_subsets(Measure::modified, Objective::per_arm, *r, mu).value;
    modified_margin = std::min(modified_margin, best_mod * (1.0 + std::log(kd)) * logs / l2);
    const std::size_t m = 2 * k + 1 + static_cast<std::size_t>(rng.below(20));
    const double gap = rng.uniform(0.01, 0.5);
    const BoundReport db = dependent_bound(*r, mu, m, gap);
    const double floor = static_cast<double>(m - 2 * k) * l2 / (8.0 * kd * gap);
    bound_margin = std::min(bound_margin, db.value / floor);
  }
  const double tol = 1.0 - 1e-12;
  ctx.at_least("max-l1-per-arm-over-l2-log-factor/min", l1_margin, tol);
  ctx.at_least("max-modified-per-arm-over-l2-log-factors/min", modified_margin, tol);
  ctx.at_least("dependent-bound-over-l2-floor/min", bound_margin, tol);
}

void suite_prefix_scan(const Ctx& ctx) {
  double match = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  double prefix_match = 0.0;
  for (std::size_t t = 0; t < ctx.trials; ++t) {
    Rng rng = ctx.trial(t);
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(11));
    Vector x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
    const double fast = norm_ratio_max(x).value;
    match = std::max(match, std::abs(fast - norm_ratio_brute(x)) / std::max(1.0, fast));
    margin = std::min(margin, fast * (1.0 + std::log(static_cast<double>(n))) / x.squaredNorm());

    const std::size_t k = random_size(rng, 8);
    const RewardPtr r = random_monotone(rng, k);
    const Vector mu = random_mu(rng, k);
    const double brute = maximize_over_subsets(Measure::l1, Objective::per_arm, *r, mu).value;
    const double prefix =
        maximize_over_subsets(Measure::l1, Objective::per_arm, *r, mu, SearchMethod::prefix).value;
    prefix_match = std::max(prefix_match, std::abs(brute - prefix) / std::max(1.0, brute));
  }
  ctx.at_most("prefix-scan-vs-brute-force", match, 1e-12);
  ctx.at_least("norm-ratio-over-log-bound/min", margin, 1.0 - 1e-12);
  ctx.at_most("l1-per-arm-prefix-vs-brute-force", prefix_match, 1e-12);
}

void suite_worked_examples(const Ctx& ctx) {
  for (std::size_t k : {4, 8, 12}) {
    const PowerGradientReward r(k);
    Vector mu(static_cast<Eigen::Index>(k));
    for (std::size_t i = 1; i <= k; ++i) {
      mu[static_cast<Eigen::Index>(i - 1)] = std::ldexp(1.0, -2 * static_cast<int>(k - i) - 1);
    }
    double worst = 0.0;
    for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t{1} << k); ++mask) {
      const SubsetSpec subset = SubsetSpec::from_mask(k, mask);
      const double l1 = gini_l1(r, mu, subset);
      worst = std::max(worst, gini_modified(r, mu, subset) / l1 * static_cast<double>(subset.complement_size()));
    }
    ctx.at_most("power-gradient-modified-over-l1-times-n/K=" + std::to_string(k), worst, 8.0);
  }
  double ratio_err = 0.0;
  double norm_margin = std::numeric_limits<double>::infinity();
  for (std::size_t n = 2; n <= 64; ++n) {
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 1; i <= n; ++i) {
      x[static_cast<Eigen::Index>(i - 1)] = std::sqrt(static_cast<double>(i)) - std::sqrt(static_cast<double>(i - 1));
    }
    ratio_err = std::max(ratio_err, std::abs(norm_ratio_max(x).value - 1.0));
    norm_margin = std::min(norm_margin, x.squaredNorm() - std::log(static_cast<double>(n + 1)) / 4.0);
  }
  ctx.at_most("sqrt-difference-norm-ratio-equals-one", ratio_err, 1e-12);
  ctx.at_least("sqrt-difference-l2-minus-log-bound/min", norm_margin, 0.0);
}

void suite_rates(const Ctx& ctx) {
  auto half = [](std::size_t k) { return Vector::Constant(static_cast<Eigen::Index>(k), 0.5); };

  double exact = 0.0;
  for (std::size_t k : {1, 2, 3, 4, 6}) {
    const RewardPtr lin = make_reward("linear", k);
    for (std::size_t m : {3 * k, 10 * k, 100 * k}) {
      for (double gap : {0.01, 0.1, 0.25}) {
        const double v = dependent_bound(*lin, half(k), m, gap).value;
        const double closed = static_cast<double>((m - 2 * k) * k) / (32.0 * gap);
        exact = std::max(exact, std::abs(v - closed) / closed);
      }
      const double t = 1e4;
      const double iv = independent_bound(*lin, half(k), m, t).value;
      const double iclosed = std::sqrt(t * static_cast<double>(k * (m - k))) / 64.0;
      exact = std::max(exact, std::abs(iv - iclosed) / iclosed);
    }
  }
  ctx.at_most("linear-half-closed-form", exact, 1e-12);

  const RewardPtr lin2 = make_reward("linear", 2);
  const RewardPtr lin4 = make_reward("linear", 4);
  const double m = 1000, gap = 0.05;
  const double base = dependent_bound(*lin2, half(2), 1000, gap).value;
  ctx.at_most("linear-double-m", std::abs(dependent_bound(*lin2, half(2), 2000, gap).value / base -
                                          (2 * m - 4) / (m - 4)),
              1e-9);
  ctx.at_most("linear-double-k", std::abs(dependent_bound(*lin4, half(4), 1000, gap).value / base -
                                          (m - 8) * 4 / ((m - 4) * 2)),
              1e-9);
  ctx.at_most("linear-double-inverse-gap",
              std::abs(dependent_bound(*lin2, half(2), 1000, gap / 2).value / base - 2.0), 1e-9);

  double scaling = 0.0;
  for (std::size_t t = 0; t < std::min<std::size_t>(ctx.trials, 200); ++t) {
    Rng rng = ctx.trial(t);
    const std::size_t k = random_size(rng, 6);
    const RewardPtr r = random_monotone(rng, k);
    const Vector mu = random_mu(rng, k);
    const std::size_t mm = 3 * k + static_cast<std::size_t>(rng.below(50));
    const double g = rng.uniform(0.01, 1.0);
    const double horizon = std::floor(rng.uniform(1.0, 1e6));
    scaling = std::max(scaling, std::abs(dependent_bound(*r, mu, mm, 4 * g).value -
                                         dependent_bound(*r, mu, mm, g).value / 4));
    scaling = std::max(scaling, std::abs(independent_bound(*r, mu, mm, 4 * horizon).value -
                                         2 * independent_bound(*r, mu, mm, horizon).value));
  }
  ctx.at_most("gap-and-horizon-scaling-exact", scaling, 0.0);

  const RewardPtr pmc = make_reward("pmc-item", 3);
  Vector pmu(3);
  pmu << 0.5, 0.0, 0.0;
  const BoundReport pd = dependent_bound(*pmc, pmu, 60, 0.1);
  const BoundReport pi = independent_bound(*pmc, pmu, 60, 1e4);
  const bool subset_ok = pd.maximizing_subset.indices() == std::vector<std::size_t>{1, 2};
  ctx.at_most("pmc-single-arm-complement-smoothness", std::abs(pd.smoothness - 0.25) + (subset_ok ? 0.0 : 1.0),
              1e-15);
  double copies = 0.0;
  for (std::size_t mcopies : {1, 2, 4, 8}) {
    const double md = static_cast<double>(mcopies);
    copies = std::max(copies, std::abs(sum_copies_bound(pd, mcopies).value - md * md * pd.value));
    copies = std::max(copies, std::abs(sum_copies_bound(pi, mcopies).value - md * pi.value));
  }
  ctx.at_most("pmc-copies-scaling", copies, 0.0);
  ctx.at_most("pmc-double-m", std::abs(dependent_bound(*pmc, pmu, 120, 0.1).value / pd.value - 114.0 / 54.0),
              1e-9);

  // Small N sit before the 1/sqrt(N) regime; the slope over {1, 4, 16, 64}
  // is about -0.24, so the rate is checked further out.
  const ExpQuadraticScan scan = exp_quadratic_scan({64, 256, 1024, 4096}, interior_grid(9999));
  ctx.at_least("exp-quadratic-slope-lower", scan.slope, -0.6);
  ctx.at_most("exp-quadratic-slope-upper", scan.slope, -0.4);
}

DisjointInstance simulation_instance() {
  const RewardPtr lin = make_reward("linear", 3);
  return build_dependent_instance(*lin, Vector::Constant(3, 0.5), 0.1, 15);
}

std::vector<std::uint64_t> episode_seeds(std::uint64_t seed, std::size_t n) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Rng::mix(seed, i));
  return out;
}

void suite_simulation(const Ctx& ctx) {
  const DisjointInstance inst = simulation_instance();
  const std::uint64_t horizon = 100000;
  const auto seeds = episode_seeds(ctx.seed, 20);
  const unsigned workers = default_workers();
  const RewardPtr reward = make_reward(inst.reward_name, inst.k);
  const std::vector<double> regrets = action_regrets(inst, *reward);
  const double max_gap = *std::max_element(regrets.begin(), regrets.end());

  const auto cucb = run_replications(inst, StrategyKind::cucb, horizon, seeds, workers);
  const BoundComparison cmp = compare_to_bound(cucb, inst);
  ctx.at_least("cucb-ratio-lower", cmp.ratio, kBandLow);
  ctx.at_most("cucb-ratio-upper", cmp.ratio, kBandHigh);

  for (StrategyKind kind : {StrategyKind::cucb, StrategyKind::bcucb, StrategyKind::epsilon_greedy}) {
    const auto traces = kind == StrategyKind::cucb ? cucb : run_replications(inst, kind, horizon, seeds, workers);
    double worst_drop = 0.0;
    double worst_excess = 0.0;
    for (const RegretTrace& tr : traces) {
      double prev = 0.0;
      for (std::size_t i = 0; i < tr.checkpoints.size(); ++i) {
        const double r = tr.cumulative_regret[i];
        worst_drop = std::max(worst_drop, prev - r);
        worst_excess = std::max(worst_excess, r - static_cast<double>(tr.checkpoints[i]) * max_gap);
        prev = r;
      }
      if (!std::isfinite(tr.final_regret())) worst_drop = std::numeric_limits<double>::infinity();
    }
    const std::string name(to_string(kind));
    ctx.at_most(name + "-regret-decrease", worst_drop, 0.0);
    ctx.at_most(name + "-regret-above-t-gap", worst_excess, 1e-9 * static_cast<double>(horizon));
  }

  const auto oracle = run_replications(inst, StrategyKind::oracle, horizon, seeds, workers);
  double oracle_max = 0.0;
  for (const RegretTrace& tr : oracle) oracle_max = std::max(oracle_max, tr.final_regret());
  ctx.at_most("oracle-regret", oracle_max, 0.0);

  const auto rr = run_replications(inst, StrategyKind::round_robin, horizon, seeds, workers);
  const std::uint64_t count = inst.actions.size();
  const std::uint64_t optimal_plays =
      horizon > inst.optimal_index ? (horizon - 1 - inst.optimal_index) / count + 1 : 0;
  const double closed = inst.gap * static_cast<double>(horizon - optimal_plays);
  double rr_err = 0.0;
  double conv = 0.0;
  for (const RegretTrace& tr : rr) {
    rr_err = std::max(rr_err, std::abs(tr.final_regret() - closed) / closed);
    std::vector<double> truth(inst.m, -1.0);
    for (std::size_t a = 0; a < inst.actions.size(); ++a) {
      const Vector means = inst.action_means(a);
      const auto& arms = inst.actions[a];
      const std::size_t common = inst.common_size();
      for (std::size_t j = 0; j < inst.complement_size(); ++j) truth[arms[common + j]] = means[static_cast<Eigen::Index>(j)];
      for (std::size_t i = 0; i < common; ++i) truth[arms[i]] = inst.mu_common[static_cast<Eigen::Index>(i)];
    }
    for (std::size_t arm = 0; arm < inst.m; ++arm) {
      const ArmStats& s = tr.arm_stats[arm];
      if (s.count == 0) continue;
      const double radius = 4.0 * std::sqrt(std::log(static_cast<double>(horizon)) / static_cast<double>(s.count));
      conv = std::max(conv, std::abs(s.mean - truth[arm]) / radius);
    }
  }
  ctx.at_most("round-robin-vs-closed-form", rr_err, 0.01);
  ctx.at_most("round-robin-mean-error-over-radius", conv, 1.0);

  // Staircase sampler marginals against the exact thresholds.
  const std::size_t draws = 1000000;
  double worst_z = 0.0;
  Rng rng = ctx.trial(0);
  for (std::size_t a : {inst.optimal_index, std::size_t{0}}) {
    std::vector<double> ones(inst.k, 0.0);
    for (std::size_t d = 0; d < draws; ++d) {
      const auto obs = sample_round(inst, rng, a);
      for (std::size_t j = 0; j < obs.size(); ++j) ones[j] += obs[j].second;
    }
    const Vector means = inst.action_means(a);
    const std::size_t common = inst.common_size();
    for (std::size_t j = 0; j < inst.k; ++j) {
      const double q = j < common ? inst.mu_common[static_cast<Eigen::Index>(j)]
                                  : means[static_cast<Eigen::Index>(j - common)];
      const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(draws));
      worst_z = std::max(worst_z, std::abs(ones[j] / static_cast<double>(draws) - q) / sigma);
    }
  }
  ctx.at_most("sampler-marginals-z", worst_z, 3.0);
}

VerifyReport run_single(std::string_view suite, std::uint64_t seed, std::size_t trials);

void suite_determinism(const Ctx& ctx) {
  std::size_t mismatches = 0;
  for (const std::string& name : suite_names()) {
    if (name == "determinism" || name == "simulation") continue;
    const Json a = to_json(run_single(name, ctx.seed, ctx.trials));
    const Json b = to_json(run_single(name, ctx.seed, ctx.trials));
    if (a.dump() != b.dump()) ++mismatches;
  }
  ctx.at_most("verify-reports-identical/mismatches", static_cast<double>(mismatches), 0.0);

  const DisjointInstance inst = simulation_instance();
  const auto seeds = episode_seeds(ctx.seed, 8);
  std::size_t sim_mismatches = 0;
  for (StrategyKind kind : {StrategyKind::cucb, StrategyKind::bcucb, StrategyKind::epsilon_greedy}) {
    const std::string serial = traces_to_csv(run_replications(inst, kind, 10000, seeds, 1));
    const std::string again = traces_to_csv(run_replications(inst, kind, 10000, seeds, 1));
    const std::string parallel = traces_to_csv(run_replications(inst, kind, 10000, seeds, 4));
    if (serial != again || serial != parallel) ++sim_mismatches;
  }
  ctx.at_most("simulation-csv-identical/mismatches", static_cast<double>(sim_mismatches), 0.0);

  std::size_t search_mismatches = 0;
  for (std::size_t t = 0; t < std::min<std::size_t>(ctx.trials, 50); ++t) {
    Rng rng = ctx.trial(t);
    const std::size_t k = 4 + static_cast<std::size_t>(rng.below(9));
    const RewardPtr r = random_monotone(rng, k);
    const Vector mu = random_mu(rng, k);
    const SubsetOptimum a = maximize_over_subsets(Measure::modified, Objective::per_arm, *r, mu);
    const SubsetOptimum b = maximize_over_subsets(Measure::modified, Objective::per_arm, *r, mu,
                                                  SearchMethod::brute, 4);
    if (!(a.subset == b.subset) || a.value != b.value) ++search_mismatches;
  }
  ctx.at_most("parallel-subset-search/mismatches", static_cast<double>(search_mismatches), 0.0);
}

using SuiteFn = void (*)(const Ctx&);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"gradients", suite_gradients}, {"lemma3", suite_kl_bound},         {"lemma4", suite_gap_first_order},
      {"lemma5", suite_eps_star},       {"prop1", suite_modified_vs_l1},           {"prop2", suite_per_arm_vs_l2},
      {"lemma6", suite_prefix_scan},       {"appendixE", suite_worked_examples}, {"rates", suite_rates},
      {"simulation", suite_simulation}, {"determinism", suite_determinism},
  };
  return table;
}

VerifyReport run_single(std::string_view suite, std::uint64_t seed, std::size_t trials) {
  VerifyReport report;
  report.suite = std::string(suite);
  report.seed = seed;
  report.trials = trials;
  for (const auto& [name, fn] : suite_table()) {
    if (name == suite) {
      const Ctx ctx{seed, trials, Rng::mix(seed, suite_key(name)), &report.checks};
      fn(ctx);
      return report;
    }
  }
  throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : suite_table()) out.push_back(entry.first);
    return out;
  }();
  return names;
}

VerifyReport run_suite(std::string_view suite, std::uint64_t seed, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  if (suite != "all") return run_single(suite, seed, trials);
  VerifyReport report;
  report.suite = "all";
  report.seed = seed;
  report.trials = trials;
  for (const std::string& name : suite_names()) {
    VerifyReport part = run_single(name, seed, trials);
    for (CheckResult& c : part.checks) {
      c.name = name + "/" + c.name;
      report.checks.push_back(std::move(c));
    }
  }
  return report;
}

}  // namespace cmablb
