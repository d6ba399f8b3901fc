#include "taxiflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "taxiflow/csv.hpp"

namespace taxiflow {

namespace {

// Hour index fits 32 bits comfortably for any civil date in range.
std::uint64_t hour_index(Timestamp hour) {
  return static_cast<std::uint64_t>(hour / kSecondsPerHour + (1LL << 20));
}

std::int64_t money_cents(double amount) { return std::llround(amount * 100.0); }
std::int64_t distance_m(double km) { return std::llround(km * 1000.0); }

}  // namespace

std::uint64_t BinTable::key(Timestamp hour, std::int32_t cell) {
  return (hour_index(hour) << 32) | static_cast<std::uint32_t>(cell);
}

HourlyBin& BinTable::at(Timestamp hour, std::int32_t cell) {
  auto [it, inserted] = bins_.try_emplace(key(hour, cell));
  if (inserted) {
    it->second.hour = hour;
    it->second.cell = cell;
  }
  return it->second;
}

void BinTable::add_trip(const TripRecord& trip, const AggregationOptions& options) {
  const Timestamp hour = hour_floor(trip.pickup_time);
  auto apply = [&](HourlyBin& bin) {
    bin.pickups += 1;
    bin.income_cents += money_cents(trip.fare_total);
    bin.dist_m += distance_m(trip.trip_distance_km);
    bin.travel_s += trip.duration_s();
  };
  apply(at(hour, -1));
  if (options.grid) {
    if (auto cell = options.grid->cell_of(trip.pickup))
      apply(at(hour, options.grid->flat_index(*cell)));
  }
}

void BinTable::add_driver_shifts(std::span<const Shift> shifts_of_driver,
                                 const AggregationOptions& options) {
  // Supply: one driver contributes at most 3600 driver-seconds per hour, no
  // matter how many of their shifts touch it. Overlap seconds are summed per
  // hour first so small gap thresholds cannot double-count a driver.
  std::map<Timestamp, std::int64_t> overlap_by_hour;
  for (const Shift& shift : shifts_of_driver) {
    for (Timestamp h = hour_floor(shift.start); h <= shift.end; h += kSecondsPerHour) {
      std::int64_t overlap = std::min(shift.end, h + kSecondsPerHour) - std::max(shift.start, h);
      overlap_by_hour[h] += overlap;
    }
    // Occupied time lands in the trip's pickup hour, empty time in the hour
    // the gap begins; the shift-level identity is preserved overall.
    for (const TripRecord& trip : shift.trips)
      at(hour_floor(trip.pickup_time), -1).occupied_s += trip.duration_s();
    for (std::size_t i = 1; i < shift.trips.size(); ++i) {
      const TripRecord& prev = shift.trips[i - 1];
      const TripRecord& next = shift.trips[i];
      std::int64_t gap = next.pickup_time - prev.dropoff_time;
      if (gap <= 0) continue;
      const Timestamp hour = hour_floor(prev.dropoff_time);
      const std::int64_t relocation = distance_m(haversine_km(prev.dropoff, next.pickup));
      auto apply_gap = [&](HourlyBin& bin) {
        bin.empty_s += gap;
        bin.relocation_m += relocation;
        bin.n_gaps += 1;
      };
      apply_gap(at(hour, -1));
      if (options.grid) {
        if (auto cell = options.grid->cell_of(prev.dropoff))
          apply_gap(at(hour, options.grid->flat_index(*cell)));
      }
    }
  }
  for (const auto& [h, overlap] : overlap_by_hour)
    at(h, -1).supply_driver_s += options.fractional_supply ? overlap : 3600;
}

void BinTable::merge(const BinTable& other) {
  for (const auto& [k, bin] : other.bins_) {
    auto [it, inserted] = bins_.emplace(k, bin);
    if (inserted) continue;
    HourlyBin& mine = it->second;
    mine.supply_driver_s += bin.supply_driver_s;
    mine.pickups += bin.pickups;
    mine.income_cents += bin.income_cents;
    mine.occupied_s += bin.occupied_s;
    mine.empty_s += bin.empty_s;
    mine.relocation_m += bin.relocation_m;
    mine.n_gaps += bin.n_gaps;
    mine.dist_m += bin.dist_m;
    mine.travel_s += bin.travel_s;
  }
}

void BinTable::finalize(const WeatherTable& weather, const AggregationOptions& options) {
  for (auto& [_, bin] : bins_) {
    bin.rainy = static_cast<std::int8_t>(weather.rain_state(bin.hour));
    double supply = bin.supply();
    bin.rate_flagged =
        supply > 0.0 &&
        static_cast<double>(bin.pickups) > supply * options.max_trips_per_driver_hour;
  }
}

const HourlyBin* BinTable::find(Timestamp hour, std::int32_t cell) const {
  auto it = bins_.find(key(hour, cell));
  return it == bins_.end() ? nullptr : &it->second;
}

std::vector<const HourlyBin*> BinTable::citywide_sorted() const {
  std::vector<const HourlyBin*> out;
  for (const auto& [_, bin] : bins_)
    if (bin.cell == -1) out.push_back(&bin);
  std::sort(out.begin(), out.end(),
            [](const HourlyBin* a, const HourlyBin* b) { return a->hour < b->hour; });
  return out;
}

std::vector<const HourlyBin*> BinTable::all_sorted() const {
  std::vector<const HourlyBin*> out;
  out.reserve(bins_.size());
  for (const auto& [_, bin] : bins_) out.push_back(&bin);
  std::sort(out.begin(), out.end(), [](const HourlyBin* a, const HourlyBin* b) {
    if (a->hour != b->hour) return a->hour < b->hour;
    return a->cell < b->cell;
  });
  return out;
}

bool operator==(const BinTable& a, const BinTable& b) {
  if (a.bins_.size() != b.bins_.size()) return false;
  for (const auto& [k, bin] : a.bins_) {
    auto it = b.bins_.find(k);
    if (it == b.bins_.end()) return false;
    const HourlyBin& o = it->second;
    if (bin.hour != o.hour || bin.cell != o.cell || bin.supply_driver_s != o.supply_driver_s ||
        bin.pickups != o.pickups || bin.income_cents != o.income_cents ||
        bin.occupied_s != o.occupied_s || bin.empty_s != o.empty_s ||
        bin.relocation_m != o.relocation_m || bin.n_gaps != o.n_gaps || bin.dist_m != o.dist_m ||
        bin.travel_s != o.travel_s || bin.rainy != o.rainy || bin.rate_flagged != o.rate_flagged)
      return false;
  }
  return true;
}

std::optional<double> pickups_per_driver(const HourlyBin& bin) {
  double supply = bin.supply();
  if (supply <= 0.0) return std::nullopt;
  return static_cast<double>(bin.pickups) / supply;
}

std::optional<double> income_per_driver(const HourlyBin& bin) {
  double supply = bin.supply();
  if (supply <= 0.0) return std::nullopt;
  return bin.income() / supply;
}

std::optional<double> space_mean_speed_kmh(const HourlyBin& bin) {
  if (bin.travel_s <= 0) return std::nullopt;
  return bin.dist_km() / (static_cast<double>(bin.travel_s) / 3600.0);
}

std::optional<double> empty_speed_kmh(const HourlyBin& bin) {
  if (bin.n_gaps == 0 || bin.empty_s <= 0) return std::nullopt;
  return bin.relocation_km() / (static_cast<double>(bin.empty_s) / 3600.0);
}

std::optional<double> mean_empty_gap_s(const HourlyBin& bin) {
  if (bin.n_gaps == 0) return std::nullopt;
  return static_cast<double>(bin.empty_s) / static_cast<double>(bin.n_gaps);
}

std::uint32_t active_supply(std::span<const Shift> shifts, Timestamp hour_start) {
  const Timestamp hour_end = hour_start + kSecondsPerHour;
  std::unordered_set<std::string_view> drivers;
  for (const Shift& shift : shifts)
    if (shift.start < hour_end && shift.end >= hour_start) drivers.insert(shift.driver);
  return static_cast<std::uint32_t>(drivers.size());
}

std::optional<EmptySpeed> empty_travel_speed(std::span<const EmptyInterval> intervals) {
  if (intervals.empty()) return std::nullopt;
  double km = 0.0;
  std::int64_t gap_s = 0;
  for (const EmptyInterval& interval : intervals) {
    km += interval.relocation_km;
    gap_s += interval.gap_seconds;
  }
  if (gap_s <= 0) return std::nullopt;
  EmptySpeed speed;
  speed.speed_kmh = km / (static_cast<double>(gap_s) / 3600.0);
  speed.mean_gap_s = static_cast<double>(gap_s) / static_cast<double>(intervals.size());
  return speed;
}

std::map<GridCell, std::uint64_t> grid_density(std::span<const TripRecord> trips, const Grid& grid) {
  std::map<GridCell, std::uint64_t> counts;
  for (const TripRecord& trip : trips)
    if (auto cell = grid.cell_of(trip.pickup)) counts[*cell] += 1;
  return counts;
}

std::string_view index_name(IndexKind kind) {
  switch (kind) {
    case IndexKind::supply: return "supply";
    case IndexKind::pickups: return "pickups";
    case IndexKind::pickups_per_driver: return "pickups_per_driver";
    case IndexKind::income_per_driver: return "income_per_driver";
    case IndexKind::space_mean_speed: return "space_mean_speed";
    case IndexKind::empty_travel_speed: return "empty_travel_speed";
  }
  return "?";
}

std::optional<IndexKind> index_from_name(std::string_view name) {
  for (IndexKind kind :
       {IndexKind::supply, IndexKind::pickups, IndexKind::pickups_per_driver,
        IndexKind::income_per_driver, IndexKind::space_mean_speed, IndexKind::empty_travel_speed})
    if (index_name(kind) == name) return kind;
  return std::nullopt;
}

std::optional<double> index_value(IndexKind kind, const HourlyBin& bin) {
  switch (kind) {
    case IndexKind::supply: return bin.supply();
    case IndexKind::pickups: return static_cast<double>(bin.pickups);
    case IndexKind::pickups_per_driver: return pickups_per_driver(bin);
    case IndexKind::income_per_driver: return income_per_driver(bin);
    case IndexKind::space_mean_speed: return space_mean_speed_kmh(bin);
    case IndexKind::empty_travel_speed: return empty_speed_kmh(bin);
  }
  return std::nullopt;
}

std::vector<SlotComparison> compare_regimes(const BinTable& bins, const WeatherTable& weather,
                                            const CompareOptions& options,
                                            ExclusionReport* exclusions) {
  struct Acc {
    double sum_clear = 0.0, sum_rainy = 0.0;
    std::uint32_t n_clear = 0, n_rainy = 0;
  };
  // slot key: day_class * 24 + hour_of_day, per index
  std::vector<std::vector<Acc>> acc(options.indices.size(), std::vector<Acc>(48));
  ExclusionReport local;

  std::vector<const HourlyBin*> selected;
  for (const HourlyBin* bin : bins.all_sorted())
    if (bin->cell == options.cell) selected.push_back(bin);

  for (const HourlyBin* bin : selected) {
    int state = weather.rain_state(bin->hour);
    if (state < 0) {
      ++local.bins_no_weather;
      continue;
    }
    int slot = (is_weekend(bin->hour) ? 24 : 0) + hour_of_day(bin->hour);
    for (std::size_t i = 0; i < options.indices.size(); ++i) {
      IndexKind kind = options.indices[i];
      std::optional<double> value = index_value(kind, *bin);
      if (!value) {
        if (kind == IndexKind::space_mean_speed) {
          ++local.bins_zero_travel;
        } else if (kind == IndexKind::empty_travel_speed) {
          ++local.bins_no_gaps;
        } else {
          ++local.bins_zero_supply;
        }
        continue;
      }
      Acc& a = acc[i][static_cast<std::size_t>(slot)];
      if (state == 1) {
        a.sum_rainy += *value;
        ++a.n_rainy;
      } else {
        a.sum_clear += *value;
        ++a.n_clear;
      }
    }
  }

  std::vector<SlotComparison> rows;
  for (std::size_t i = 0; i < options.indices.size(); ++i) {
    for (int slot = 0; slot < 48; ++slot) {
      const Acc& a = acc[i][static_cast<std::size_t>(slot)];
      if (a.n_clear == 0 && a.n_rainy == 0) continue;
      SlotComparison row;
      row.day_class = slot >= 24 ? DayClass::weekend : DayClass::weekday;
      row.hour_of_day = slot % 24;
      row.index = options.indices[i];
      if (a.n_clear > 0) row.clear_mean = a.sum_clear / a.n_clear;
      if (a.n_rainy > 0) row.rainy_mean = a.sum_rainy / a.n_rainy;
      row.n_clear = a.n_clear;
      row.n_rainy = a.n_rainy;
      row.masked = a.n_clear + a.n_rainy < options.min_slot_samples;
      if (row.masked) ++local.slots_masked;
      rows.push_back(row);
    }
  }
  if (exclusions != nullptr) *exclusions = local;
  return rows;
}

std::string bin_csv_header() {
  return "hour,cell,supply,pickups,income,occupied_s,empty_s,dist_km,travel_s,rainy";
}

void append_bin_csv_row(std::string& out, const HourlyBin& bin) {
  out += format_timestamp(bin.hour);
  out += ',';
  append_i64(out, bin.cell);
  out += ',';
  append_double(out, bin.supply());
  out += ',';
  append_i64(out, static_cast<std::int64_t>(bin.pickups));
  out += ',';
  append_double(out, bin.income());
  out += ',';
  append_i64(out, bin.occupied_s);
  out += ',';
  append_i64(out, bin.empty_s);
  out += ',';
  append_double(out, bin.dist_km());
  out += ',';
  append_i64(out, bin.travel_s);
  out += ',';
  if (bin.rainy < 0) {
    out += "";
  } else {
    out += bin.rainy == 1 ? '1' : '0';
  }
  out += '\n';
}

std::string comparison_csv(std::span<const SlotComparison> rows) {
  std::string out = "slot,index,clear_mean,rainy_mean,n_clear,n_rainy,masked\n";
  for (const SlotComparison& row : rows) {
    out += day_class_name(row.day_class);
    out += ':';
    if (row.hour_of_day < 10) out += '0';
    append_i64(out, row.hour_of_day);
    out += ',';
    out += index_name(row.index);
    out += ',';
    if (row.clear_mean) append_double(out, *row.clear_mean);
    out += ',';
    if (row.rainy_mean) append_double(out, *row.rainy_mean);
    out += ',';
    append_i64(out, row.n_clear);
    out += ',';
    append_i64(out, row.n_rainy);
    out += ',';
    out += row.masked ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace taxiflow
