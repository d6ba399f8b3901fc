#pragma once

#include <optional>
#include <span>
#include <vector>

#include "taxiflow/metrics.hpp"
#include "taxiflow/stats.hpp"
#include "taxiflow/weather.hpp"
#include "taxiflow/windows.hpp"

namespace taxiflow {

// One index sampled hourly, the unit the rainy-vs-clear tests run on.
struct IndexSeries {
  IndexKind index = IndexKind::pickups_per_driver;
  std::vector<std::pair<Timestamp, double>> points;  // sorted by hour
};

IndexSeries hourly_index_series(const BinTable& bins, IndexKind kind, std::int32_t cell = -1);

enum class DayClassFilter { weekday, weekend, all };
std::string_view day_class_filter_name(DayClassFilter filter);

struct ComparisonRunOptions {
  WindowLabel window = WindowLabel::morning_peak;
  WindowConfig windows;
  std::size_t n_pseudo_days = 200;
  std::uint64_t seed = 1;
  StatsOptions stats;
  bool run_observed = true;
  bool run_permutation = true;
};

// One output row of the results table: a day-class and test method with
// permutation and observed columns side by side.
struct ComparisonRow {
  DayClassFilter day_class = DayClassFilter::weekday;
  Method method = Method::wilcoxon_signed_rank;
  std::optional<TestResult> permutation;
  std::optional<TestResult> observed;
};

// The hour pool a permutation run resamples for one window and day-class:
// hours with both an index value and a rain classification. Exposed so the
// pseudo-day export can reproduce exactly what run_comparison used.
std::vector<Timestamp> comparison_pool(const IndexSeries& series, const WeatherTable& weather,
                                       const WindowConfig& windows, WindowLabel window,
                                       DayClassFilter filter);
std::uint64_t comparison_seed(std::uint64_t base_seed, WindowLabel window, DayClassFilter filter);

// Rainy-vs-clear tests for one index over one peak window.
//
// Observed regime: hourly index values inside the window/day-class are split
// by the hour's rain state; Mann-Whitney and Kruskal-Wallis compare the two
// groups, Wilcoxon pairs the per-slot (hour-of-day x day-class) rainy and
// clear means.
//
// Permutation regime: pseudo-days of four window hours are resampled from the
// pool; each pseudo-day contributes its rainy-hour mean and clear-hour mean.
// Mann-Whitney and Kruskal-Wallis compare the pooled pseudo-day means,
// Wilcoxon pairs them within each pseudo-day.
//
// A side with fewer than two samples marks the result insufficient.
std::vector<ComparisonRow> run_comparison(const IndexSeries& series, const WeatherTable& weather,
                                          const ComparisonRunOptions& options);

// day_class,test,perm_statistic,perm_pvalue,obs_statistic,obs_pvalue
// Insufficient or skipped entries render as "-", mirroring the table layout.
std::string comparison_table_csv(std::span<const ComparisonRow> rows);

// pseudo_day_id,hour,rainy for audit of the resampling.
std::string pseudo_days_csv(std::span<const PseudoDay> days, const WeatherTable& weather);

}  // namespace taxiflow
