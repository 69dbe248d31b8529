#pragma once

#include <span>
#include <string>
#include <vector>

#include "crossdecode/rng.hpp"

namespace crossdecode {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly for large x.
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution: Q(df/2, x/2). chi2_sf(0, df) == 1.
double chi2_sf(double x, int df);

struct KruskalWallisResult {
  double h = 0.0;
  int df = 0;
  double p = 1.0;
};

/// Mid-ranks over the pooled sample, ties averaged, with the tie-correction divisor
/// 1 - sum(t^3 - t) / (N^3 - N). If every value is tied, H = 0 and p = 1.
/// Throws InputError for fewer than two groups or an empty group.
KruskalWallisResult kruskal_wallis(std::span<const std::vector<double>> groups);

/// Paired two-sided percentile bootstrap on the mean of a - b:
/// p = min(1, 2 min(#{mean* <= 0} + 1, #{mean* >= 0} + 1) / (B + 1)).
/// Throws InputError on length mismatch, fewer than 2 pairs or B < 100.
double bootstrap_paired(std::span<const double> a, std::span<const double> b, int resamples, Rng& rng);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator
};

/// Throws InputError for fewer than two values.
Summary summarize(std::span<const double> values);

inline constexpr double kAlpha = 0.05;

struct GroupSummary {
  std::string name;
  Summary summary;
  int n = 0;
};

/// Kruskal-Wallis plus every pairwise paired bootstrap, as reported by the stats command.
struct StatsReport {
  KruskalWallisResult kw;
  std::vector<GroupSummary> groups;
  /// Symmetric; diagonal is 1. Entry is negative when the two groups differ in length
  /// and no paired test applies.
  std::vector<std::vector<double>> pairwise_p;
  int resamples = 0;
  std::uint64_t seed = 0;
  double alpha = kAlpha;
};

/// Pair (i, j), i < j, uses stream "bootstrap-{i}-{j}".
StatsReport run_stats(std::span<const std::vector<double>> groups, std::span<const std::string> names,
                      int resamples, std::uint64_t seed);

}  // namespace crossdecode
