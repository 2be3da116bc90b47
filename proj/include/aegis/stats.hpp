#pragma once

#include <span>
#include <string>
#include <vector>

#include "aegis/random.hpp"

namespace aegis {

struct MedianMad {
  double median = 0.0;
  double mad = 0.0;
};

/// DomainError on empty input.
double median(std::span<const double> values);
MedianMad median_mad(std::span<const double> values);

/// Linearly interpolated sample quantile (p in [0,1]) of unsorted values.
double quantile(std::span<const double> values, double p);

/// Ranks 1..n; tied values share the mean of their positions.
std::vector<double> fractional_ranks(std::span<const double> values);

struct WilcoxonResult {
  double p_value = 1.0;
  /// Sum of ranks of the positive differences a - b.
  double w_plus = 0.0;
  int n_effective = 0;
  bool exact = true;
  /// Every difference was zero; p is 1.
  bool all_zero = false;
};

/// Paired signed-rank test of H1: a tends to be smaller than b. Zero
/// differences are dropped and tied magnitudes get average ranks. Exact null
/// distribution up to 25 non-zero pairs, otherwise a normal approximation
/// with tie and continuity corrections.
WilcoxonResult wilcoxon_one_sided(std::span<const double> a, std::span<const double> b);

inline constexpr int kWilcoxonExactLimit = 25;

/// Step-down rejections, in the input order.
std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha = 0.05);

struct MethodOutcome {
  std::string method;
  std::vector<double> regrets;  // paired by repeat index
};

enum class Flag { Best, Equivalent, Worse };
std::string_view to_string(Flag flag);

struct ComparisonRow {
  std::string method;
  double median = 0.0;
  double mad = 0.0;
  Flag flag = Flag::Worse;
  /// Uncorrected one-sided p-value of best < method; 1 for the best row.
  double p_value = 1.0;
  bool all_zero = false;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // input order
  std::size_t best = 0;
  /// Non-empty when the best median was tied and a tie-break was needed.
  std::string tie_note;
};

/// Best = lowest median (then lower MAD, then name). Every other method is
/// tested against it and Holm-Bonferroni is applied across those tests;
/// non-rejected methods are equivalent. A single method is simply best.
ComparisonTable best_or_equivalent(const std::vector<MethodOutcome>& outcomes, double alpha = 0.05);

/// traces[method][repeat][iteration]. Each draw picks one repeat per method
/// with replacement and ranks the methods at every iteration (lower is
/// better). Returns the mean rank [method][iteration].
std::vector<std::vector<double>> fractional_rank_bootstrap(
    const std::vector<std::vector<std::vector<double>>>& traces, int n_boot, Rng& rng);

}  // namespace aegis
