#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace taxiflow {

enum class Method { mann_whitney, wilcoxon_signed_rank, kruskal_wallis };
enum class Alternative { two_sided, less, greater };
enum class Regime { observed, permutation };

std::string_view method_name(Method method);

struct TestResult {
  Method method = Method::mann_whitney;
  Regime regime = Regime::observed;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  bool ties_present = false;
  bool exact = false;         // exact enumeration path vs. asymptotic approximation
  bool insufficient = false;  // set by run_comparison when a side has < 2 samples
};

struct StatsOptions {
  // Exact enumeration below/at this many total observations (Mann-Whitney)
  // or nonzero pairs (Wilcoxon); asymptotic approximations beyond.
  std::size_t exact_cutoff = 20;
  // Pratt's treatment: rank zero differences, then drop them. Default is
  // Wilcoxon's original drop-first treatment.
  bool signed_zero_wilcoxon = false;
};

// Midranks of values (average rank for ties, 1-based). When tie_sum is given
// it receives the tie-correction term sum over groups of (t^3 - t).
std::vector<double> midranks(std::span<const double> values, double* tie_sum = nullptr);

// Standard normal CDF and the chi-squared survival function used by the
// asymptotic test paths.
double normal_cdf(double z);
double chi_squared_sf(double x, int df);

// Mann-Whitney U for two independent samples. The reported statistic is U of
// the first sample with midrank tie handling. Exact p-values enumerate all
// C(n1+n2, n1) label assignments; asymptotic p-values use the tie-corrected
// normal approximation with continuity correction. Two-sided p is
// min(1, 2*min(P(U' <= U), P(U' >= U))) under the exact distribution.
// Throws std::invalid_argument on an empty sample.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          Alternative alternative = Alternative::two_sided,
                          const StatsOptions& options = {});

// Wilcoxon signed-rank over paired observations (a, b) with d = a - b. Zero
// differences are dropped (or Pratt-ranked when configured); the statistic is
// min(W+, W-). Exact p enumerates the 2^m sign assignments. Throws
// std::invalid_argument("degenerate pairing") when every difference is zero.
TestResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs,
                                Alternative alternative = Alternative::two_sided,
                                const StatsOptions& options = {});

// Kruskal-Wallis H across k groups with midranks and tie correction; H = 0
// when every observation ties. p from the chi-squared distribution with k-1
// degrees of freedom. Throws std::invalid_argument on an empty group or
// fewer than two groups.
TestResult kruskal_wallis(std::span<const std::vector<double>> groups);

}  // namespace taxiflow
