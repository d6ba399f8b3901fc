#pragma once

#include <span>
#include <utility>
#include <vector>

// Brute-force reference implementations for the rank tests, kept independent
// of the library: ranks come from pairwise counting rather than sorting, U
// from direct pair comparison, and exact p-values from exhaustive label or
// sign enumeration. Slow on purpose; only for small inputs in tests.
namespace oracle {

struct TwoSampleResult {
  double statistic = 0.0;
  double p_less = 0.0;
  double p_greater = 0.0;
  double p_two_sided = 0.0;
};

// U of x by pair counting; exact p over all C(n1+n2, n1) assignments.
TwoSampleResult mann_whitney(std::span<const double> x, std::span<const double> y);

// W+ and min(W+, W-) with counting-based midranks; exact p over 2^m signs.
struct WilcoxonResult {
  double w_plus = 0.0;
  double w_minus = 0.0;
  double statistic = 0.0;  // min(w_plus, w_minus)
  double p_less = 0.0;
  double p_greater = 0.0;
  double p_two_sided = 0.0;
};
WilcoxonResult wilcoxon(std::span<const std::pair<double, double>> pairs);

// H via the variance identity H = (N-1) * SS_between / SS_total over ranks,
// which equals the tie-corrected textbook formula.
double kruskal_wallis_h(std::span<const std::vector<double>> groups);

}  // namespace oracle
