#include "aegis/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aegis/errors.hpp"

namespace aegis {

double median(std::span<const double> values) {
  if (values.empty()) throw DomainError("median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MedianMad median_mad(std::span<const double> values) {
  const double m = median(values);
  std::vector<double> dev(values.size());
  std::transform(values.begin(), values.end(), dev.begin(), [m](double v) { return std::abs(v - m); });
  return {m, median(dev)};
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level outside [0,1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_one_sided(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("wilcoxon_one_sided: samples are not paired");
  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) diff.push_back(a[i] - b[i]);

  WilcoxonResult res;
  res.n_effective = static_cast<int>(diff.size());
  if (diff.empty()) {
    res.all_zero = true;
    res.p_value = 1.0;
    return res;
  }
  std::vector<double> mag(diff.size());
  std::transform(diff.begin(), diff.end(), mag.begin(), [](double d) { return std::abs(d); });
  const std::vector<double> ranks = fractional_ranks(mag);
  for (std::size_t i = 0; i < diff.size(); ++i)
    if (diff[i] > 0) res.w_plus += ranks[i];

  const int n = res.n_effective;
  if (n <= kWilcoxonExactLimit) {
    // Average ranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<int> doubled(n);
    for (int i = 0; i < n; ++i) doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
    const int total = std::accumulate(doubled.begin(), doubled.end(), 0);
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    int reach = 0;
    for (int r : doubled) {
      for (int s = reach; s >= 0; --s)
        if (count[s] != 0.0) count[s + r] += count[s];
      reach += r;
    }
    const int w2 = static_cast<int>(std::lround(2.0 * res.w_plus));
    double below = 0.0;
    for (int s = 0; s <= w2; ++s) below += count[s];
    res.p_value = below / std::ldexp(1.0, n);
    res.exact = true;
  } else {
    const double nn = n;
    const double mean = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    std::vector<double> sorted = mag;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      var -= (t * t * t - t) / 48.0;
      i = j + 1;
    }
    res.exact = false;
    res.p_value = var > 0.0 ? normal_cdf((res.w_plus - mean + 0.5) / std::sqrt(var)) : 1.0;
  }
  res.p_value = std::min(1.0, res.p_value);
  return res;
}

std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });
  std::vector<bool> reject(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    if (!(p_values[order[k]] <= alpha / static_cast<double>(m - k))) break;
    reject[order[k]] = true;
  }
  return reject;
}

std::string_view to_string(Flag flag) {
  switch (flag) {
    case Flag::Best: return "best";
    case Flag::Equivalent: return "equivalent";
    case Flag::Worse: return "worse";
  }
  return "?";
}

ComparisonTable best_or_equivalent(const std::vector<MethodOutcome>& outcomes, double alpha) {
  if (outcomes.empty()) throw DomainError("best_or_equivalent: no methods");
  const std::size_t repeats = outcomes.front().regrets.size();
  for (const auto& o : outcomes)
    if (o.regrets.size() != repeats)
      throw DomainError("best_or_equivalent: method " + o.method + " has a different repeat count");

  ComparisonTable table;
  for (const auto& o : outcomes) {
    const MedianMad mm = median_mad(o.regrets);
    table.rows.push_back({o.method, mm.median, mm.mad, Flag::Worse, 1.0, false});
  }
  std::size_t best = 0;
  bool tied = false;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const auto& b = table.rows[best];
    if (r.median == b.median) tied = true;
    if (r.median < b.median || (r.median == b.median && (r.mad < b.mad || (r.mad == b.mad && r.method < b.method))))
      best = i;
  }
  if (tied) {
    std::size_t n_tied = 0;
    for (const auto& r : table.rows) n_tied += r.median == table.rows[best].median;
    if (n_tied > 1)
      table.tie_note = std::to_string(n_tied) + " methods share the lowest median; " + table.rows[best].method +
                       " chosen by MAD then name";
  }
  table.best = best;
  table.rows[best].flag = Flag::Best;

  std::vector<double> p;
  std::vector<std::size_t> who;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (i == best) continue;
    const WilcoxonResult w = wilcoxon_one_sided(outcomes[best].regrets, outcomes[i].regrets);
    table.rows[i].p_value = w.p_value;
    table.rows[i].all_zero = w.all_zero;
    p.push_back(w.p_value);
    who.push_back(i);
  }
  const std::vector<bool> reject = holm_bonferroni(p, alpha);
  for (std::size_t k = 0; k < who.size(); ++k) table.rows[who[k]].flag = reject[k] ? Flag::Worse : Flag::Equivalent;
  return table;
}

std::vector<std::vector<double>> fractional_rank_bootstrap(
    const std::vector<std::vector<std::vector<double>>>& traces, int n_boot, Rng& rng) {
  if (n_boot < 1) throw DomainError("fractional_rank_bootstrap: n_boot must be >= 1");
  const std::size_t m = traces.size();
  if (m == 0) return {};
  std::size_t iters = 0;
  for (const auto& method : traces) {
    if (method.empty()) throw DomainError("fractional_rank_bootstrap: method without repeats");
    for (const auto& t : method) {
      if (iters == 0) iters = t.size();
      if (t.size() != iters) throw DomainError("fractional_rank_bootstrap: traces are not aligned");
    }
  }
  std::vector<std::vector<double>> mean(m, std::vector<double>(iters, 0.0));
  std::vector<std::size_t> pick(m);
  std::vector<double> column(m);
  for (int b = 0; b < n_boot; ++b) {
    for (std::size_t k = 0; k < m; ++k) {
      std::uniform_int_distribution<std::size_t> u(0, traces[k].size() - 1);
      pick[k] = u(rng);
    }
    for (std::size_t t = 0; t < iters; ++t) {
      for (std::size_t k = 0; k < m; ++k) column[k] = traces[k][pick[k]][t];
      const std::vector<double> r = fractional_ranks(column);
      for (std::size_t k = 0; k < m; ++k) mean[k][t] += r[k];
    }
  }
  for (auto& row : mean)
    for (double& v : row) v /= n_boot;
  return mean;
}

}  // namespace aegis
