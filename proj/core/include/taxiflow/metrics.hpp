#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "taxiflow/geo.hpp"
#include "taxiflow/shifts.hpp"
#include "taxiflow/weather.hpp"
#include "taxiflow/windows.hpp"

namespace taxiflow {

// Per-hour (optionally per-cell) aggregate. Monetary and distance fields are
// accumulated in integer units (cents, meters, driver-seconds) so that
// partitioned aggregation merges to bit-identical totals regardless of order.
struct HourlyBin {
  Timestamp hour = 0;
  std::int32_t cell = -1;  // -1 = citywide
  std::int64_t supply_driver_s = 0;  // 3600 per active driver; fractional mode uses overlap seconds
  std::uint64_t pickups = 0;
  std::int64_t income_cents = 0;
  std::int64_t occupied_s = 0;
  std::int64_t empty_s = 0;        // dropoff-to-next-pickup gaps starting this hour
  std::int64_t relocation_m = 0;   // straight-line distance covered during those gaps
  std::uint64_t n_gaps = 0;
  std::int64_t dist_m = 0;
  std::int64_t travel_s = 0;
  std::int8_t rainy = -1;  // -1 unknown, 0 clear, 1 rainy
  bool rate_flagged = false;

  double supply() const { return static_cast<double>(supply_driver_s) / 3600.0; }
  double income() const { return static_cast<double>(income_cents) / 100.0; }
  double dist_km() const { return static_cast<double>(dist_m) / 1000.0; }
  double relocation_km() const { return static_cast<double>(relocation_m) / 1000.0; }
};

struct AggregationOptions {
  std::optional<Grid> grid;          // when set, trips also aggregate per cell
  bool fractional_supply = false;    // count partial-hour overlap instead of whole drivers
  std::uint32_t max_trips_per_driver_hour = 12;
  WindowConfig windows;
};

// Mergeable bin table. Trip-level fields may be accumulated over arbitrary
// partitions of the trip stream; shift-level fields (supply, occupied, empty)
// over any driver-complete partition of the shifts. Derived rates are only
// meaningful after every partition has been merged. Supply and occupied time
// are citywide (cell -1) only; per-cell bins carry pickups/income/distance
// from the trip pass plus gap fields attributed to the dropoff's cell, so a
// hotspot cell supports the empty-travel-speed index.
class BinTable {
 public:
  void add_trip(const TripRecord& trip, const AggregationOptions& options);
  void add_driver_shifts(std::span<const Shift> shifts_of_driver, const AggregationOptions& options);
  void merge(const BinTable& other);

  // Applies rain classification and the pickups-per-driver sanity flag.
  void finalize(const WeatherTable& weather, const AggregationOptions& options);

  const HourlyBin* find(Timestamp hour, std::int32_t cell = -1) const;
  std::vector<const HourlyBin*> citywide_sorted() const;
  std::vector<const HourlyBin*> all_sorted() const;
  std::size_t size() const { return bins_.size(); }

  friend bool operator==(const BinTable& a, const BinTable& b);

 private:
  HourlyBin& at(Timestamp hour, std::int32_t cell);
  static std::uint64_t key(Timestamp hour, std::int32_t cell);

  std::unordered_map<std::uint64_t, HourlyBin> bins_;
};

// Derived per-bin indices. Bins that cannot support an index (zero supply,
// zero travel time) yield nullopt and are excluded from averages; exclusions
// are tallied, never silently dropped.
std::optional<double> pickups_per_driver(const HourlyBin& bin);
std::optional<double> income_per_driver(const HourlyBin& bin);
std::optional<double> space_mean_speed_kmh(const HourlyBin& bin);
std::optional<double> empty_speed_kmh(const HourlyBin& bin);  // relocation over gap time
std::optional<double> mean_empty_gap_s(const HourlyBin& bin);

// Distinct drivers whose shift interval [start, end] overlaps [hour, hour+1).
std::uint32_t active_supply(std::span<const Shift> shifts, Timestamp hour_start);

struct EmptySpeed {
  double speed_kmh = 0.0;
  double mean_gap_s = 0.0;
};

// Totals-ratio speed over dropoff->next-pickup relocations plus the mean gap.
std::optional<EmptySpeed> empty_travel_speed(std::span<const EmptyInterval> intervals);

// Pickup counts per grid cell; trips outside the grid's bbox are ignored.
std::map<GridCell, std::uint64_t> grid_density(std::span<const TripRecord> trips, const Grid& grid);

enum class IndexKind {
  supply,
  pickups,
  pickups_per_driver,
  income_per_driver,
  space_mean_speed,
  empty_travel_speed,
};

std::string_view index_name(IndexKind kind);
std::optional<IndexKind> index_from_name(std::string_view name);

// Hourly value of an index over a bin, when defined.
std::optional<double> index_value(IndexKind kind, const HourlyBin& bin);

struct SlotComparison {
  DayClass day_class = DayClass::weekday;
  int hour_of_day = 0;
  IndexKind index = IndexKind::pickups;
  std::optional<double> clear_mean;
  std::optional<double> rainy_mean;
  std::uint32_t n_clear = 0;
  std::uint32_t n_rainy = 0;
  bool masked = false;  // below the minimum sample count on either side
};

struct CompareOptions {
  std::vector<IndexKind> indices = {IndexKind::supply,           IndexKind::pickups,
                                    IndexKind::pickups_per_driver, IndexKind::income_per_driver,
                                    IndexKind::space_mean_speed,   IndexKind::empty_travel_speed};
  std::uint32_t min_slot_samples = 10;
  std::int32_t cell = -1;  // restrict to one grid cell; -1 = citywide
};

struct ExclusionReport {
  std::uint64_t bins_no_weather = 0;
  std::uint64_t bins_zero_supply = 0;  // for per-driver indices
  std::uint64_t bins_zero_travel = 0;  // for space-mean speed
  std::uint64_t bins_no_gaps = 0;      // for empty-travel speed
  std::uint64_t slots_masked = 0;
};

// Mean of each index over rainy vs. clear hours for every (hour-of-day,
// day-class) slot. Slots with a missing side keep the populated side only.
std::vector<SlotComparison> compare_regimes(const BinTable& bins, const WeatherTable& weather,
                                            const CompareOptions& options,
                                            ExclusionReport* exclusions = nullptr);

std::string bin_csv_header();
void append_bin_csv_row(std::string& out, const HourlyBin& bin);
std::string comparison_csv(std::span<const SlotComparison> rows);

}  // namespace taxiflow
