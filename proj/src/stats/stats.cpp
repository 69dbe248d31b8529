#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crossdecode/errors.hpp"
#include "crossdecode/stats.hpp"

namespace crossdecode {

KruskalWallisResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw InputError(fmt::format("Kruskal-Wallis needs at least 2 groups, got {}", groups.size()));

  struct Entry {
    double value;
    std::size_t group;
  };
  std::vector<Entry> pooled;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw InputError(fmt::format("group {} is empty", g));
    for (double v : groups[g]) {
      if (!std::isfinite(v)) throw InputError(fmt::format("group {} holds a non-finite value", g));
      pooled.push_back({v, g});
    }
  }
  std::stable_sort(pooled.begin(), pooled.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });

  const auto n = static_cast<double>(pooled.size());
  std::vector<double> rank_sums(groups.size(), 0.0);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
    // Positions i..j-1 share the mid-rank of 1-based ranks i+1..j.
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) rank_sums[pooled[k].group] += mid_rank;
    const auto t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  double weighted = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    weighted += rank_sums[g] * rank_sums[g] / static_cast<double>(groups[g].size());

  KruskalWallisResult out;
  out.df = static_cast<int>(groups.size()) - 1;
  const double correction = 1.0 - tie_term / (n * n * n - n);
  if (!(correction > 0.0)) {
    out.h = 0.0;
    out.p = 1.0;
    return out;
  }
  const double h_raw = 12.0 / (n * (n + 1.0)) * weighted - 3.0 * (n + 1.0);
  out.h = std::max(0.0, h_raw / correction);
  out.p = chi2_sf(out.h, out.df);
  return out;
}

double bootstrap_paired(std::span<const double> a, std::span<const double> b, int resamples, Rng& rng) {
  if (a.size() != b.size())
    throw InputError(fmt::format("paired bootstrap needs equal lengths, got {} and {}", a.size(), b.size()));
  if (a.size() < 2) throw InputError(fmt::format("paired bootstrap needs at least 2 pairs, got {}", a.size()));
  if (resamples < 100) throw InputError(fmt::format("bootstrap needs at least 100 resamples, got {}", resamples));

  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

  long at_or_below = 0;
  long at_or_above = 0;
  for (int r = 0; r < resamples; ++r) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += diff[rng.below(n)];
    const double mean = total / static_cast<double>(n);
    if (mean <= 0.0) ++at_or_below;
    if (mean >= 0.0) ++at_or_above;
  }
  const double tail = static_cast<double>(std::min(at_or_below + 1, at_or_above + 1));
  return std::min(1.0, 2.0 * tail / (resamples + 1.0));
}

Summary summarize(std::span<const double> values) {
  if (values.size() < 2) throw InputError(fmt::format("summary needs at least 2 values, got {}", values.size()));
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

StatsReport run_stats(std::span<const std::vector<double>> groups, std::span<const std::string> names,
                      int resamples, std::uint64_t seed) {
  if (names.size() != groups.size())
    throw InputError(fmt::format("{} group names for {} groups", names.size(), groups.size()));
  StatsReport report;
  report.kw = kruskal_wallis(groups);
  report.resamples = resamples;
  report.seed = seed;
  for (std::size_t g = 0; g < groups.size(); ++g)
    report.groups.push_back({names[g], summarize(groups[g]), static_cast<int>(groups[g].size())});

  const std::size_t k = groups.size();
  report.pairwise_p.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double p = -1.0;
      if (groups[i].size() == groups[j].size()) {
        Rng rng = derive_rng(seed, fmt::format("bootstrap-{}-{}", i, j));
        p = bootstrap_paired(groups[i], groups[j], resamples, rng);
      }
      report.pairwise_p[i][j] = p;
      report.pairwise_p[j][i] = p;
    }
  }
  return report;
}

}  // namespace crossdecode
