#include "taxiflow/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "taxiflow/csv.hpp"
#include "taxiflow/rng.hpp"

namespace taxiflow {

IndexSeries hourly_index_series(const BinTable& bins, IndexKind kind, std::int32_t cell) {
  IndexSeries series;
  series.index = kind;
  for (const HourlyBin* bin : bins.all_sorted()) {
    if (bin->cell != cell) continue;
    if (auto value = index_value(kind, *bin)) series.points.emplace_back(bin->hour, *value);
  }
  return series;
}

std::string_view day_class_filter_name(DayClassFilter filter) {
  switch (filter) {
    case DayClassFilter::weekday: return "weekday";
    case DayClassFilter::weekend: return "weekend";
    case DayClassFilter::all: return "all";
  }
  return "?";
}

namespace {

bool filter_matches(DayClassFilter filter, Timestamp hour) {
  if (filter == DayClassFilter::all) return true;
  return (filter == DayClassFilter::weekend) == is_weekend(hour);
}

TestResult insufficient_result(Method method, Regime regime) {
  TestResult r;
  r.method = method;
  r.regime = regime;
  r.statistic = std::numeric_limits<double>::quiet_NaN();
  r.p_value = std::numeric_limits<double>::quiet_NaN();
  r.insufficient = true;
  return r;
}

struct SplitSamples {
  std::vector<double> rainy;
  std::vector<double> clear_;
  std::vector<std::pair<double, double>> pairs;  // (rainy, clear)
};

TestResult test_groups(Method method, Regime regime, const SplitSamples& samples,
                       const StatsOptions& stats) {
  if (method == Method::wilcoxon_signed_rank) {
    if (samples.pairs.size() < 2) return insufficient_result(method, regime);
    bool any_nonzero = false;
    for (const auto& [a, b] : samples.pairs) any_nonzero |= a != b;
    if (!any_nonzero) return insufficient_result(method, regime);
    TestResult r = wilcoxon_signed_rank(samples.pairs, Alternative::two_sided, stats);
    r.regime = regime;
    return r;
  }
  if (samples.rainy.size() < 2 || samples.clear_.size() < 2)
    return insufficient_result(method, regime);
  TestResult r;
  if (method == Method::mann_whitney) {
    r = mann_whitney_u(samples.rainy, samples.clear_, Alternative::two_sided, stats);
  } else {
    std::vector<std::vector<double>> groups = {samples.rainy, samples.clear_};
    r = kruskal_wallis(groups);
  }
  r.regime = regime;
  return r;
}

}  // namespace

std::vector<Timestamp> comparison_pool(const IndexSeries& series, const WeatherTable& weather,
                                       const WindowConfig& windows, WindowLabel window,
                                       DayClassFilter filter) {
  std::vector<Timestamp> pool;
  for (const auto& [hour, _] : series.points) {
    if (windows.classify(hour_of_day(hour)) != window) continue;
    if (weather.rain_state(hour) < 0) continue;
    if (!filter_matches(filter, hour)) continue;
    pool.push_back(hour);
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::uint64_t comparison_seed(std::uint64_t base_seed, WindowLabel window, DayClassFilter filter) {
  return derive_seed(base_seed, (static_cast<std::uint64_t>(window) << 8) |
                                    static_cast<std::uint64_t>(filter));
}

std::vector<ComparisonRow> run_comparison(const IndexSeries& series, const WeatherTable& weather,
                                          const ComparisonRunOptions& options) {
  // Window hours with a value and a rain classification.
  struct HourPoint {
    Timestamp hour;
    double value;
    bool rainy;
  };
  std::vector<HourPoint> points;
  for (const auto& [hour, value] : series.points) {
    if (options.windows.classify(hour_of_day(hour)) != options.window) continue;
    int state = weather.rain_state(hour);
    if (state < 0) continue;
    points.push_back(HourPoint{hour, value, state == 1});
  }
  std::sort(points.begin(), points.end(),
            [](const HourPoint& a, const HourPoint& b) { return a.hour < b.hour; });
  std::unordered_map<Timestamp, const HourPoint*> by_hour;
  for (const HourPoint& p : points) by_hour.emplace(p.hour, &p);

  std::vector<ComparisonRow> rows;
  const DayClassFilter filters[] = {DayClassFilter::weekday, DayClassFilter::weekend,
                                    DayClassFilter::all};
  const Method methods[] = {Method::wilcoxon_signed_rank, Method::mann_whitney,
                            Method::kruskal_wallis};

  for (DayClassFilter filter : filters) {
    SplitSamples observed;
    // Per-slot means for the observed pairing: slot = day-class x hour-of-day.
    struct SlotAcc {
      double rainy_sum = 0.0, clear_sum = 0.0;
      std::uint32_t rainy_n = 0, clear_n = 0;
    };
    std::map<int, SlotAcc> slots;
    for (const HourPoint& p : points) {
      if (!filter_matches(filter, p.hour)) continue;
      if (p.rainy) {
        observed.rainy.push_back(p.value);
      } else {
        observed.clear_.push_back(p.value);
      }
      int slot = (is_weekend(p.hour) ? 24 : 0) + hour_of_day(p.hour);
      SlotAcc& acc = slots[slot];
      if (p.rainy) {
        acc.rainy_sum += p.value;
        ++acc.rainy_n;
      } else {
        acc.clear_sum += p.value;
        ++acc.clear_n;
      }
    }
    for (const auto& [_, acc] : slots)
      if (acc.rainy_n > 0 && acc.clear_n > 0)
        observed.pairs.emplace_back(acc.rainy_sum / acc.rainy_n, acc.clear_sum / acc.clear_n);

    SplitSamples permutation;
    if (options.run_permutation) {
      std::vector<Timestamp> pool;
      for (const HourPoint& p : points)
        if (filter_matches(filter, p.hour)) pool.push_back(p.hour);
      if (pool.size() >= kPseudoDayHours) {
        std::uint64_t seed = comparison_seed(options.seed, options.window, filter);
        std::vector<PseudoDay> days = permutation_days(pool, seed, options.n_pseudo_days);
        for (const PseudoDay& day : days) {
          double rainy_sum = 0.0, clear_sum = 0.0;
          std::uint32_t rainy_n = 0, clear_n = 0;
          for (Timestamp hour : day.hours) {
            const HourPoint* p = by_hour.at(hour);
            if (p->rainy) {
              rainy_sum += p->value;
              ++rainy_n;
            } else {
              clear_sum += p->value;
              ++clear_n;
            }
          }
          if (rainy_n > 0) permutation.rainy.push_back(rainy_sum / rainy_n);
          if (clear_n > 0) permutation.clear_.push_back(clear_sum / clear_n);
          if (rainy_n > 0 && clear_n > 0)
            permutation.pairs.emplace_back(rainy_sum / rainy_n, clear_sum / clear_n);
        }
      }
    }

    for (Method method : methods) {
      ComparisonRow row;
      row.day_class = filter;
      row.method = method;
      if (options.run_observed)
        row.observed = test_groups(method, Regime::observed, observed, options.stats);
      if (options.run_permutation)
        row.permutation = test_groups(method, Regime::permutation, permutation, options.stats);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

void append_result_cells(std::string& out, const std::optional<TestResult>& result) {
  if (!result || result->insufficient) {
    out += "-,-";
    return;
  }
  append_double(out, result->statistic);
  out += ',';
  append_double(out, result->p_value);
}

}  // namespace

std::string comparison_table_csv(std::span<const ComparisonRow> rows) {
  std::string out = "day_class,test,perm_statistic,perm_pvalue,obs_statistic,obs_pvalue\n";
  for (const ComparisonRow& row : rows) {
    out += day_class_filter_name(row.day_class);
    out += ',';
    out += method_name(row.method);
    out += ',';
    append_result_cells(out, row.permutation);
    out += ',';
    append_result_cells(out, row.observed);
    out += '\n';
  }
  return out;
}

std::string pseudo_days_csv(std::span<const PseudoDay> days, const WeatherTable& weather) {
  std::string out = "pseudo_day_id,hour,rainy\n";
  for (std::size_t i = 0; i < days.size(); ++i) {
    for (Timestamp hour : days[i].hours) {
      append_i64(out, static_cast<std::int64_t>(i));
      out += ',';
      out += format_timestamp(hour);
      out += ',';
      int state = weather.rain_state(hour);
      out += state < 0 ? "-" : (state == 1 ? "1" : "0");
      out += '\n';
    }
  }
  return out;
}

}  // namespace taxiflow
