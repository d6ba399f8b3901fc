#include "taxiflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace taxiflow {

std::string_view method_name(Method method) {
  switch (method) {
    case Method::mann_whitney: return "mann_whitney";
    case Method::wilcoxon_signed_rank: return "wilcoxon";
    case Method::kruskal_wallis: return "kruskal";
  }
  return "?";
}

std::vector<double> midranks(std::span<const double> values, double* tie_sum) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  double ties = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  if (tie_sum != nullptr) *tie_sum = ties;
  return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }

namespace {

// Regularized incomplete gamma: series for x < a+1, continued fraction
// otherwise. Classic Lentz form.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double clamp_p(double p) { return std::min(1.0, std::max(0.0, p)); }

double two_sided_from_counts(double below_or_equal, double above_or_equal, double total) {
  double lo = below_or_equal / total;
  double hi = above_or_equal / total;
  return clamp_p(2.0 * std::min(lo, hi));
}

}  // namespace

double chi_squared_sf(double x, int df) {
  if (df <= 0) throw std::invalid_argument("chi-squared needs df >= 1");
  return clamp_p(gamma_q(0.5 * df, 0.5 * x));
}

// ---------------------------------------------------------------------------
// Mann-Whitney
// ---------------------------------------------------------------------------

namespace {

// Counts label assignments with rank-sum <= / >= the observed sum by walking
// every C(n, k) index combination. Midranks are doubled to keep sums integral
// so the comparisons are exact.
struct RankSumCounter {
  std::vector<std::int64_t> ranks2;  // midranks * 2
  std::size_t n1 = 0;
  std::int64_t target2 = 0;
  double le = 0.0, ge = 0.0, total = 0.0;

  void run() {
    std::vector<std::size_t> pick(n1);
    std::iota(pick.begin(), pick.end(), 0);
    const std::size_t n = ranks2.size();
    for (;;) {
      std::int64_t sum = 0;
      for (std::size_t i : pick) sum += ranks2[i];
      total += 1.0;
      if (sum <= target2) le += 1.0;
      if (sum >= target2) ge += 1.0;
      // next combination
      std::size_t i = n1;
      while (i > 0) {
        --i;
        if (pick[i] != i + n - n1) {
          ++pick[i];
          for (std::size_t j = i + 1; j < n1; ++j) pick[j] = pick[j - 1] + 1;
          break;
        }
        if (i == 0) return;
      }
      if (n1 == 0) return;
    }
  }
};

}  // namespace

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          Alternative alternative, const StatsOptions& options) {
  const std::size_t n1 = x.size(), n2 = y.size();
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("mann-whitney: empty sample");
  const std::size_t n = n1 + n2;

  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  double tie_sum = 0.0;
  std::vector<double> ranks = midranks(pooled, &tie_sum);

  double rank_sum_x = 0.0;
  for (std::size_t i = 0; i < n1; ++i) rank_sum_x += ranks[i];
  const double u_stat = rank_sum_x - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);

  TestResult result;
  result.method = Method::mann_whitney;
  result.statistic = u_stat;
  result.n1 = n1;
  result.n2 = n2;
  result.ties_present = tie_sum > 0.0;

  if (n <= options.exact_cutoff) {
    RankSumCounter counter;
    counter.ranks2.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      counter.ranks2[i] = static_cast<std::int64_t>(std::llround(2.0 * ranks[i]));
    counter.n1 = n1;
    counter.target2 = static_cast<std::int64_t>(std::llround(2.0 * rank_sum_x));
    counter.run();
    result.exact = true;
    switch (alternative) {
      case Alternative::less: result.p_value = clamp_p(counter.le / counter.total); break;
      case Alternative::greater: result.p_value = clamp_p(counter.ge / counter.total); break;
      case Alternative::two_sided:
        result.p_value = two_sided_from_counts(counter.le, counter.ge, counter.total);
        break;
    }
    return result;
  }

  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2), dn = static_cast<double>(n);
  const double mean = 0.5 * dn1 * dn2;
  const double variance = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));
  result.exact = false;
  if (variance <= 0.0) {
    result.p_value = 1.0;  // every observation tied
    return result;
  }
  const double sd = std::sqrt(variance);
  switch (alternative) {
    case Alternative::greater:
      result.p_value = clamp_p(1.0 - normal_cdf((u_stat - mean - 0.5) / sd));
      break;
    case Alternative::less:
      result.p_value = clamp_p(normal_cdf((u_stat - mean + 0.5) / sd));
      break;
    case Alternative::two_sided: {
      double z = (std::fabs(u_stat - mean) - 0.5) / sd;
      if (z < 0.0) z = 0.0;
      result.p_value = clamp_p(2.0 * (1.0 - normal_cdf(z)));
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank
// ---------------------------------------------------------------------------

TestResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs,
                                Alternative alternative, const StatsOptions& options) {
  std::vector<double> diffs;
  diffs.reserve(pairs.size());
  std::size_t zeros = 0;
  for (const auto& [a, b] : pairs) {
    double d = a - b;
    if (d == 0.0) {
      ++zeros;
      if (options.signed_zero_wilcoxon) diffs.push_back(0.0);
    } else {
      diffs.push_back(d);
    }
  }
  const std::size_t nonzero = diffs.size() - (options.signed_zero_wilcoxon ? zeros : 0);
  if (nonzero == 0) throw std::invalid_argument("degenerate pairing");

  std::vector<double> abs_diffs(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) abs_diffs[i] = std::fabs(diffs[i]);
  double tie_sum = 0.0;
  std::vector<double> ranks = midranks(abs_diffs, &tie_sum);

  double w_plus = 0.0, w_minus = 0.0;
  std::vector<double> nonzero_ranks;
  nonzero_ranks.reserve(nonzero);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0.0) {
      w_plus += ranks[i];
      nonzero_ranks.push_back(ranks[i]);
    } else if (diffs[i] < 0.0) {
      w_minus += ranks[i];
      nonzero_ranks.push_back(ranks[i]);
    }
    // Pratt zeros keep their rank but belong to neither sum.
  }

  TestResult result;
  result.method = Method::wilcoxon_signed_rank;
  result.statistic = std::min(w_plus, w_minus);
  result.n1 = nonzero;
  result.n2 = nonzero;
  result.ties_present = tie_sum > 0.0 || zeros > 0;

  if (nonzero <= options.exact_cutoff) {
    // Enumerate sign assignments over the nonzero ranks; doubled ranks keep
    // sums integral.
    std::vector<std::int64_t> ranks2(nonzero);
    for (std::size_t i = 0; i < nonzero; ++i)
      ranks2[i] = static_cast<std::int64_t>(std::llround(2.0 * nonzero_ranks[i]));
    const std::int64_t target2 = static_cast<std::int64_t>(std::llround(2.0 * w_plus));
    const std::uint64_t combos = 1ULL << nonzero;
    double le = 0.0, ge = 0.0;
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < nonzero; ++i)
        if (mask & (1ULL << i)) sum += ranks2[i];
      if (sum <= target2) le += 1.0;
      if (sum >= target2) ge += 1.0;
    }
    const double total = static_cast<double>(combos);
    result.exact = true;
    switch (alternative) {
      case Alternative::less: result.p_value = clamp_p(le / total); break;
      case Alternative::greater: result.p_value = clamp_p(ge / total); break;
      case Alternative::two_sided: result.p_value = two_sided_from_counts(le, ge, total); break;
    }
    return result;
  }

  // Sign-flip null: W+ = sum r_i B_i with fair Bernoulli signs, so the mean
  // is sum(r)/2 and the variance sum(r^2)/4. For zero-dropped midranks this
  // equals the textbook m(m+1)(2m+1)/24 - ties/48 form; it also stays correct
  // under the Pratt zero treatment, where ranks are not 1..m.
  double rank_sum = 0.0, rank_sq_sum = 0.0;
  for (double r : nonzero_ranks) {
    rank_sum += r;
    rank_sq_sum += r * r;
  }
  const double mean = rank_sum / 2.0;
  const double variance = rank_sq_sum / 4.0;
  result.exact = false;
  if (variance <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double sd = std::sqrt(variance);
  switch (alternative) {
    case Alternative::greater:
      result.p_value = clamp_p(1.0 - normal_cdf((w_plus - mean - 0.5) / sd));
      break;
    case Alternative::less:
      result.p_value = clamp_p(normal_cdf((w_plus - mean + 0.5) / sd));
      break;
    case Alternative::two_sided: {
      double z = (std::fabs(w_plus - mean) - 0.5) / sd;
      if (z < 0.0) z = 0.0;
      result.p_value = clamp_p(2.0 * (1.0 - normal_cdf(z)));
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Kruskal-Wallis
// ---------------------------------------------------------------------------

TestResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw std::invalid_argument("kruskal-wallis: need at least two groups");
  std::size_t n = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("kruskal-wallis: empty group");
    n += g.size();
  }
  if (n < 3) throw std::invalid_argument("kruskal-wallis: need at least three observations");

  std::vector<double> pooled;
  pooled.reserve(n);
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  double tie_sum = 0.0;
  std::vector<double> ranks = midranks(pooled, &tie_sum);

  const double dn = static_cast<double>(n);
  double h = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    h += rank_sum * rank_sum / static_cast<double>(g.size());
    offset += g.size();
  }
  h = 12.0 / (dn * (dn + 1.0)) * h - 3.0 * (dn + 1.0);
  const double correction = 1.0 - tie_sum / (dn * dn * dn - dn);

  TestResult result;
  result.method = Method::kruskal_wallis;
  result.n1 = groups[0].size();
  result.n2 = n - groups[0].size();
  result.ties_present = tie_sum > 0.0;
  result.exact = false;
  if (correction <= 0.0) {
    result.statistic = 0.0;  // every observation tied
    result.p_value = 1.0;
    return result;
  }
  result.statistic = h / correction;
  result.p_value = chi_squared_sf(result.statistic, static_cast<int>(groups.size()) - 1);
  return result;
}

}  // namespace taxiflow
