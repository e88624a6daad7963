#include "cmablb/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cmablb {

std::string_view to_string(BoundKind kind) { return kind == BoundKind::dependent ? "dependent" : "independent"; }

BoundKind parse_bound_kind(std::string_view s) {
  if (s == "dependent") return BoundKind::dependent;
  if (s == "independent") return BoundKind::independent;
  throw std::invalid_argument("unknown bound kind '" + std::string(s) + "'");
}

BoundReport dependent_bound(const RewardModel& reward, const Vector& mu, std::size_t m, double gap,
                            unsigned workers) {
  reward.validate(mu);
  if (!(gap > 0.0)) throw std::invalid_argument("gap must be strictly positive");
  BoundReport out;
  out.kind = BoundKind::dependent;
  out.mu = mu;
  out.m = m;
  out.k = static_cast<std::size_t>(mu.size());
  out.gap = gap;
  const SubsetOptimum best =
      maximize_over_subsets(Measure::modified, Objective::per_arm, reward, mu, SearchMethod::brute, workers);
  out.maximizing_subset = best.subset;
  out.smoothness = best.value * static_cast<double>(best.subset.complement_size());
  if (m <= 2 * out.k) {
    out.degenerate = true;
    out.value = 0.0;
    return out;
  }
  out.value = static_cast<double>(m - 2 * out.k) * best.value / (8.0 * gap);
  return out;
}

BoundReport independent_bound(const RewardModel& reward, const Vector& mu, std::size_t m, double horizon,
                              unsigned workers) {
  reward.validate(mu);
  const std::size_t k = static_cast<std::size_t>(mu.size());
  if (m < 3 * k) throw std::invalid_argument("m must be at least 3K = " + std::to_string(3 * k));
  if (!(horizon >= 1.0)) throw std::invalid_argument("horizon must be at least 1");
  BoundReport out;
  out.kind = BoundKind::independent;
  out.mu = mu;
  out.m = m;
  out.k = k;
  out.horizon = horizon;
  // gamma / sqrt(N) is maximized wherever gamma^2 / N is.
  const SubsetOptimum best =
      maximize_over_subsets(Measure::modified, Objective::per_arm, reward, mu, SearchMethod::brute, workers);
  out.maximizing_subset = best.subset;
  out.smoothness = best.value * static_cast<double>(best.subset.complement_size());
  out.value = std::sqrt(best.value) / 32.0 * std::sqrt(horizon * static_cast<double>(m - k));
  return out;
}

BoundReport sum_copies_bound(const BoundReport& base, std::size_t copies) {
  if (copies == 0) throw std::invalid_argument("copies must be at least 1");
  BoundReport out = base;
  const double factor = static_cast<double>(copies);
  out.value = base.kind == BoundKind::dependent ? base.value * factor * factor : base.value * factor;
  out.copies = base.copies * copies;
  return out;
}

std::vector<double> interior_grid(std::size_t points) {
  std::vector<double> grid;
  grid.reserve(points);
  for (std::size_t i = 1; i <= points; ++i) grid.push_back(static_cast<double>(i) / static_cast<double>(points + 1));
  return grid;
}

ExpQuadraticScan exp_quadratic_scan(const std::vector<std::size_t>& sizes, const std::vector<double>& p0_grid) {
  ExpQuadraticScan scan;
  for (std::size_t n : sizes) {
    if (n == 0) throw std::invalid_argument("scan sizes must be positive");
    const RewardPtr reward = make_reward("exp-quadratic", n);
    const SubsetSpec none = SubsetSpec::empty(n);
    ScanRow row;
    row.n = n;
    for (double p0 : p0_grid) {
      if (!(p0 > 0.0 && p0 < 1.0)) continue;
      const double v = gini_modified(*reward, Vector::Constant(static_cast<Eigen::Index>(n), p0), none) /
                       static_cast<double>(n);
      if (v > row.best_value) {
        row.best_value = v;
        row.best_p0 = p0;
      }
    }
    scan.rows.push_back(row);
  }
  if (scan.rows.size() >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double count = static_cast<double>(scan.rows.size());
    for (const ScanRow& r : scan.rows) {
      const double x = std::log(static_cast<double>(r.n));
      const double y = std::log(r.best_value);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    scan.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  }
  return scan;
}

}  // namespace cmablb
