#pragma once

#include "cmablb/rewards.hpp"
#include "cmablb/smoothness.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace cmablb {

enum class BoundKind { dependent, independent };

std::string_view to_string(BoundKind kind);
BoundKind parse_bound_kind(std::string_view s);

struct BoundReport {
  BoundKind kind = BoundKind::dependent;
  double value = 0.0;
  SubsetSpec maximizing_subset;
  /// Modified smoothness at the maximizing subset.
  double smoothness = 0.0;
  /// m <= 2K for the dependent bound: value reported as 0.
  bool degenerate = false;

  Vector mu;
  std::size_t m = 0;
  std::size_t k = 0;
  std::optional<double> gap;
  std::optional<double> horizon;
  std::size_t copies = 1;
};

/// max_I (m - 2K) gamma~^2(mu; I) / (8 N_I gap).
BoundReport dependent_bound(const RewardModel& reward, const Vector& mu, std::size_t m, double gap,
                            unsigned workers = 1);

/// max_I (gamma~(mu; I) / 32) sqrt(T (m - K) / N_I). Requires m >= 3K.
BoundReport independent_bound(const RewardModel& reward, const Vector& mu, std::size_t m, double horizon,
                              unsigned workers = 1);

/// Sum of M identical copies: dependent bounds scale by M^2, independent by M.
BoundReport sum_copies_bound(const BoundReport& base, std::size_t copies);

struct ScanRow {
  std::size_t n = 0;
  double best_p0 = 0.0;
  double best_value = 0.0;  // max over the grid of gamma~^2 / N
};

struct ExpQuadraticScan {
  std::vector<ScanRow> rows;
  /// Least-squares slope of log(best_value) against log(N).
  double slope = 0.0;
};

/// For each N, all-equal means p0 on the exp-quadratic reward with I empty,
/// maximizing gamma~^2 / N over the grid. Grid points outside (0, 1) are
/// skipped.
ExpQuadraticScan exp_quadratic_scan(const std::vector<std::size_t>& sizes, const std::vector<double>& p0_grid);

/// `points` equally spaced values strictly inside (0, 1).
std::vector<double> interior_grid(std::size_t points);

}  // namespace cmablb
