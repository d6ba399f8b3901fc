#include "taxiflow/shifts.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "taxiflow/csv.hpp"

namespace taxiflow {

std::string_view driver_key(const TripRecord& trip, DriverIdentity identity) {
  return identity == DriverIdentity::hack_license ? trip.hack_license : trip.medallion;
}

std::vector<Shift> synthesize_shifts(std::string driver, std::vector<TripRecord> trips,
                                     const GapPolicy& policy, SynthesisStats* stats) {
  std::vector<Shift> shifts;
  if (trips.empty()) return shifts;
  std::sort(trips.begin(), trips.end(), [](const TripRecord& a, const TripRecord& b) {
    if (a.pickup_time != b.pickup_time) return a.pickup_time < b.pickup_time;
    return a.dropoff_time < b.dropoff_time;
  });

  // Resolve overlaps first so gap evaluation sees a clean sequence.
  std::vector<TripRecord> kept;
  kept.reserve(trips.size());
  for (TripRecord& trip : trips) {
    if (!kept.empty() && trip.pickup_time < kept.back().dropoff_time) {
      if (policy.overlap == OverlapPolicy::drop_later) {
        if (stats != nullptr) ++stats->overlaps_dropped;
        continue;
      }
      // Clip: the earlier trip ends when the next one starts. If that would
      // leave the earlier trip with no time at all, drop the later one.
      if (trip.pickup_time - kept.back().pickup_time >= 1) {
        kept.back().dropoff_time = trip.pickup_time;
        if (stats != nullptr) ++stats->overlaps_clipped;
      } else {
        if (stats != nullptr) ++stats->overlaps_dropped;
        continue;
      }
    }
    kept.push_back(std::move(trip));
  }

  Shift current;
  auto open_shift = [&](TripRecord&& trip) {
    current = Shift{};
    current.driver = driver;
    current.start = trip.pickup_time;
    current.trips.push_back(std::move(trip));
  };
  auto close_shift = [&] {
    const TripRecord& last = current.trips.back();
    current.end = last.dropoff_time;
    for (const TripRecord& t : current.trips) {
      current.occupied_seconds += t.duration_s();
      current.income += t.fare_total;
    }
    for (std::size_t i = 1; i < current.trips.size(); ++i)
      current.empty_seconds += current.trips[i].pickup_time - current.trips[i - 1].dropoff_time;
    shifts.push_back(std::move(current));
  };

  for (TripRecord& trip : kept) {
    if (current.trips.empty()) {
      open_shift(std::move(trip));
      continue;
    }
    std::int64_t gap = trip.pickup_time - current.trips.back().dropoff_time;
    if (gap > policy.gap_threshold_s) {
      close_shift();
      open_shift(std::move(trip));
    } else {
      current.trips.push_back(std::move(trip));
    }
  }
  if (!current.trips.empty()) close_shift();
  return shifts;
}

std::vector<Shift> synthesize_all_shifts(std::vector<TripRecord> trips, DriverIdentity identity,
                                         const GapPolicy& policy, SynthesisStats* stats) {
  std::unordered_map<std::string, std::vector<TripRecord>> by_driver;
  for (TripRecord& trip : trips) {
    std::string key(driver_key(trip, identity));
    by_driver[std::move(key)].push_back(std::move(trip));
  }
  trips.clear();
  trips.shrink_to_fit();

  std::vector<Shift> all;
  for (auto& [driver, driver_trips] : by_driver) {
    std::vector<Shift> shifts =
        synthesize_shifts(driver, std::move(driver_trips), policy, stats);
    for (Shift& s : shifts) all.push_back(std::move(s));
  }
  std::sort(all.begin(), all.end(), [](const Shift& a, const Shift& b) {
    if (a.driver != b.driver) return a.driver < b.driver;
    return a.start < b.start;
  });
  return all;
}

std::vector<EmptyInterval> empty_intervals(const Shift& shift) {
  std::vector<EmptyInterval> intervals;
  for (std::size_t i = 1; i < shift.trips.size(); ++i) {
    const TripRecord& prev = shift.trips[i - 1];
    const TripRecord& next = shift.trips[i];
    std::int64_t gap = next.pickup_time - prev.dropoff_time;
    if (gap <= 0) continue;
    EmptyInterval interval;
    interval.from_dropoff = prev.dropoff_time;
    interval.to_pickup = next.pickup_time;
    interval.from_point = prev.dropoff;
    interval.to_point = next.pickup;
    interval.gap_seconds = gap;
    interval.relocation_km = haversine_km(prev.dropoff, next.pickup);
    intervals.push_back(interval);
  }
  return intervals;
}

ShiftSummary summarize(const Shift& shift) {
  return ShiftSummary{shift.driver,  shift.start,           shift.end, shift.n_pickups(),
                      shift.income,  shift.occupied_seconds, shift.empty_seconds};
}

TimeOfDayHistogram time_of_day_histogram(std::span<const int> minutes_of_day, int bin_minutes) {
  if (bin_minutes <= 0 || 1440 % bin_minutes != 0)
    throw std::invalid_argument("bin width must divide 1440 minutes");
  TimeOfDayHistogram h;
  h.bin_minutes = bin_minutes;
  h.mass.assign(static_cast<std::size_t>(1440 / bin_minutes), 0.0);
  if (minutes_of_day.empty()) return h;
  for (int m : minutes_of_day) h.mass[h.bin_of(m)] += 1.0;
  for (double& v : h.mass) v /= static_cast<double>(minutes_of_day.size());
  return h;
}

ShiftTimeDensities shift_time_densities(std::span<const Shift> shifts, int bin_minutes) {
  if (shifts.empty()) throw std::invalid_argument("no shifts");
  std::vector<int> starts, ends;
  starts.reserve(shifts.size());
  ends.reserve(shifts.size());
  for (const Shift& s : shifts) {
    starts.push_back(minute_of_day(s.start));
    ends.push_back(minute_of_day(s.end));
  }
  return ShiftTimeDensities{time_of_day_histogram(starts, bin_minutes),
                            time_of_day_histogram(ends, bin_minutes)};
}

std::string shift_csv_header() { return "driver,start,end,n_pickups,income,occupied_s,empty_s"; }

void append_shift_csv_row(std::string& out, const ShiftSummary& row) {
  out += row.driver;
  out += ',';
  out += format_timestamp(row.start);
  out += ',';
  out += format_timestamp(row.end);
  out += ',';
  append_i64(out, static_cast<std::int64_t>(row.n_pickups));
  out += ',';
  append_double(out, row.income);
  out += ',';
  append_i64(out, row.occupied_s);
  out += ',';
  append_i64(out, row.empty_s);
  out += '\n';
}

std::string density_csv(const TimeOfDayHistogram& histogram) {
  std::string out = "bin_start_minutes,density\n";
  for (std::size_t i = 0; i < histogram.mass.size(); ++i) {
    append_i64(out, static_cast<std::int64_t>(i) * histogram.bin_minutes);
    out += ',';
    append_double(out, histogram.mass[i]);
    out += '\n';
  }
  return out;
}

}  // namespace taxiflow
