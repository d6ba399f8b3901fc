#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "taxiflow/ingest.hpp"

namespace taxiflow {

// A reconstructed work session: consecutive trips of one driver with
// inter-trip gaps no larger than the configured threshold. Start is the first
// pickup and end the last dropoff, so supply derived from shifts
// underestimates true supply by any unobserved pre-pickup cruising.
struct Shift {
  std::string driver;
  std::vector<TripRecord> trips;  // time-ordered
  Timestamp start = 0;
  Timestamp end = 0;
  std::int64_t occupied_seconds = 0;  // sum of trip durations
  std::int64_t empty_seconds = 0;     // sum of dropoff->next-pickup gaps
  double income = 0.0;

  std::size_t n_pickups() const { return trips.size(); }
};

enum class OverlapPolicy {
  drop_later,  // discard the later-starting trip
  clip,        // truncate the earlier trip's dropoff to the next pickup
};

struct GapPolicy {
  std::int64_t gap_threshold_s = 8 * 3600;  // gap <= threshold keeps the shift together
  OverlapPolicy overlap = OverlapPolicy::drop_later;
};

struct SynthesisStats {
  std::uint64_t overlaps_dropped = 0;
  std::uint64_t overlaps_clipped = 0;
};

enum class DriverIdentity { hack_license, medallion };

std::string_view driver_key(const TripRecord& trip, DriverIdentity identity);

// Partitions one driver's trips into shifts. Trips must all belong to the
// same driver; they are sorted by (pickup, dropoff) internally. Overlapping
// trips are resolved by the configured policy and counted in stats.
std::vector<Shift> synthesize_shifts(std::string driver, std::vector<TripRecord> trips,
                                     const GapPolicy& policy = {}, SynthesisStats* stats = nullptr);

// Groups a trip set by driver identity and synthesizes every driver's shifts.
// Output is sorted by (driver, start) for deterministic downstream order.
std::vector<Shift> synthesize_all_shifts(std::vector<TripRecord> trips,
                                         DriverIdentity identity = DriverIdentity::hack_license,
                                         const GapPolicy& policy = {},
                                         SynthesisStats* stats = nullptr);

// A dropoff-to-next-pickup gap inside one shift. Relocation distance is the
// straight-line haversine between the dropoff and the next pickup; the true
// trajectory is unknown, so this is a lower bound.
struct EmptyInterval {
  Timestamp from_dropoff = 0;
  Timestamp to_pickup = 0;
  GeoPoint from_point;
  GeoPoint to_point;
  std::int64_t gap_seconds = 0;
  double relocation_km = 0.0;
};

// Intervals with gap > 0 only; back-to-back trips contribute nothing.
std::vector<EmptyInterval> empty_intervals(const Shift& shift);

// Flat export row for the shift CSV.
struct ShiftSummary {
  std::string driver;
  Timestamp start = 0;
  Timestamp end = 0;
  std::uint64_t n_pickups = 0;
  double income = 0.0;
  std::int64_t occupied_s = 0;
  std::int64_t empty_s = 0;
};

ShiftSummary summarize(const Shift& shift);

// Probability mass per time-of-day bin; bins cover [00:00, 24:00) and the
// masses sum to 1.
struct TimeOfDayHistogram {
  int bin_minutes = 30;
  std::vector<double> mass;

  std::size_t bin_of(int minute_of_day) const {
    return static_cast<std::size_t>(minute_of_day / bin_minutes);
  }
};

TimeOfDayHistogram time_of_day_histogram(std::span<const int> minutes_of_day, int bin_minutes);

struct ShiftTimeDensities {
  TimeOfDayHistogram start;
  TimeOfDayHistogram end;
};

// Throws std::invalid_argument("no shifts") on empty input.
ShiftTimeDensities shift_time_densities(std::span<const Shift> shifts, int bin_minutes = 30);

std::string shift_csv_header();
void append_shift_csv_row(std::string& out, const ShiftSummary& row);
std::string density_csv(const TimeOfDayHistogram& histogram);

}  // namespace taxiflow
