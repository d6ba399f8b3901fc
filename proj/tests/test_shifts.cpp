#include <doctest.h>

#include <set>

#include "taxiflow/rng.hpp"
#include "taxiflow/shifts.hpp"
#include "taxiflow/stats.hpp"

using namespace taxiflow;

namespace {

TripRecord trip_at(Timestamp pickup, Timestamp dropoff, const char* driver = "D1",
                   GeoPoint from = {40.75, -73.98}, GeoPoint to = {40.75, -73.98}) {
  TripRecord t;
  t.medallion = "M1";
  t.hack_license = driver;
  t.pickup_time = pickup;
  t.dropoff_time = dropoff;
  t.pickup = from;
  t.dropoff = to;
  t.trip_distance_km = 1.0;
  t.fare_total = 10.0;
  return t;
}

const Timestamp kBase = make_timestamp(2013, 6, 3, 8, 0, 0);

}  // namespace

TEST_CASE("gap over the threshold splits the shift") {
  std::vector<TripRecord> trips = {
      trip_at(kBase, kBase + 60 * 60),                               // ends 09:00
      trip_at(kBase + 65 * 60, kBase + 80 * 60),                     // 09:05 - 09:20
      trip_at(make_timestamp(2013, 6, 3, 18, 0), make_timestamp(2013, 6, 3, 18, 20)),
  };
  auto shifts = synthesize_shifts("D1", trips);  // 09:20 -> 18:00 is 8h40m
  REQUIRE(shifts.size() == 2);
  CHECK(shifts[0].n_pickups() == 2);
  CHECK(shifts[1].n_pickups() == 1);
}

TEST_CASE("single trip forms a shift with zero empty time") {
  auto shifts = synthesize_shifts("D1", {trip_at(kBase, kBase + 600)});
  REQUIRE(shifts.size() == 1);
  CHECK(shifts[0].empty_seconds == 0);
  CHECK(shifts[0].occupied_seconds == 600);
  CHECK(shifts[0].start == kBase);
  CHECK(shifts[0].end == kBase + 600);
}

TEST_CASE("gap exactly at the threshold stays in one shift") {
  // Gaps of 10 minutes and 7h59m (both <= 8h) keep three trips together.
  Timestamp t0 = kBase;
  std::vector<TripRecord> trips = {
      trip_at(t0, t0 + 600),
      trip_at(t0 + 600 + 600, t0 + 600 + 600 + 600),
      trip_at(t0 + 1800 + (7 * 3600 + 59 * 60), t0 + 1800 + (7 * 3600 + 59 * 60) + 600),
  };
  auto shifts = synthesize_shifts("D1", trips);
  CHECK(shifts.size() == 1);
  CHECK(shifts[0].n_pickups() == 3);

  // A boundary gap of exactly 8h also stays together.
  std::vector<TripRecord> boundary = {
      trip_at(t0, t0 + 600),
      trip_at(t0 + 600 + 8 * 3600, t0 + 1200 + 8 * 3600),
  };
  CHECK(synthesize_shifts("D1", boundary).size() == 1);
  // One second beyond splits.
  std::vector<TripRecord> beyond = {
      trip_at(t0, t0 + 600),
      trip_at(t0 + 601 + 8 * 3600, t0 + 1201 + 8 * 3600),
  };
  CHECK(synthesize_shifts("D1", beyond).size() == 2);
}

TEST_CASE("overlap policies") {
  std::vector<TripRecord> trips = {
      trip_at(kBase, kBase + 1200),
      trip_at(kBase + 600, kBase + 1800),  // starts before the first ends
      trip_at(kBase + 2400, kBase + 3000),
  };
  SUBCASE("drop_later removes the intruding trip") {
    SynthesisStats stats;
    auto shifts = synthesize_shifts("D1", trips, GapPolicy{}, &stats);
    REQUIRE(shifts.size() == 1);
    CHECK(shifts[0].n_pickups() == 2);
    CHECK(stats.overlaps_dropped == 1);
  }
  SUBCASE("clip truncates the earlier trip") {
    GapPolicy policy;
    policy.overlap = OverlapPolicy::clip;
    SynthesisStats stats;
    auto shifts = synthesize_shifts("D1", trips, policy, &stats);
    REQUIRE(shifts.size() == 1);
    CHECK(shifts[0].n_pickups() == 3);
    CHECK(stats.overlaps_clipped == 1);
    CHECK(shifts[0].trips[0].dropoff_time == kBase + 600);
  }
}

TEST_CASE("time-budget identity holds on fuzzed inputs") {
  Rng rng(4242);
  for (int iteration = 0; iteration < 200; ++iteration) {
    std::vector<TripRecord> trips;
    Timestamp t = kBase + static_cast<Timestamp>(rng.below(86400));
    std::size_t n = 1 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i) {
      Timestamp duration = 1 + static_cast<Timestamp>(rng.below(3600));
      // Occasionally jump far to force a split; occasionally overlap.
      Timestamp gap;
      switch (rng.below(10)) {
        case 0: gap = 8 * 3600 + 1 + static_cast<Timestamp>(rng.below(7200)); break;
        case 1: gap = -static_cast<Timestamp>(rng.below(600)); break;
        default: gap = static_cast<Timestamp>(rng.below(3 * 3600));
      }
      t += gap;
      trips.push_back(trip_at(t, t + duration));
      t += duration;
    }
    GapPolicy policy;
    policy.overlap = iteration % 2 == 0 ? OverlapPolicy::drop_later : OverlapPolicy::clip;
    auto shifts = synthesize_shifts("D1", trips, policy);
    std::size_t total_trips = 0;
    for (const Shift& s : shifts) {
      CHECK(s.occupied_seconds + s.empty_seconds == s.end - s.start);
      CHECK(s.occupied_seconds >= 0);
      CHECK(s.empty_seconds >= 0);
      total_trips += s.n_pickups();
      for (std::size_t i = 1; i < s.trips.size(); ++i) {
        CHECK(s.trips[i].pickup_time > s.trips[i - 1].pickup_time);
        std::int64_t gap = s.trips[i].pickup_time - s.trips[i - 1].dropoff_time;
        CHECK(gap >= 0);
        CHECK(gap <= policy.gap_threshold_s);
      }
    }
    CHECK(total_trips <= trips.size());
    if (policy.overlap == OverlapPolicy::clip) {
      // Clipping keeps every trip unless it degenerates.
      CHECK(total_trips >= shifts.size());
    }
  }
}

TEST_CASE("partition property: every trip lands in exactly one shift") {
  Rng rng(7);
  std::vector<TripRecord> trips;
  Timestamp t = kBase;
  for (int i = 0; i < 100; ++i) {
    Timestamp duration = 60 + static_cast<Timestamp>(rng.below(1200));
    trips.push_back(trip_at(t, t + duration));
    t += duration + 60 + static_cast<Timestamp>(rng.below(10 * 3600));
  }
  auto shifts = synthesize_shifts("D1", trips);
  std::multiset<Timestamp> seen;
  for (const Shift& s : shifts)
    for (const TripRecord& trip : s.trips) seen.insert(trip.pickup_time);
  std::multiset<Timestamp> expected;
  for (const TripRecord& trip : trips) expected.insert(trip.pickup_time);
  CHECK(seen == expected);

  // Idempotence: re-running on each shift's trips reproduces that shift alone.
  for (const Shift& s : shifts) {
    auto again = synthesize_shifts("D1", s.trips);
    REQUIRE(again.size() == 1);
    CHECK(again[0].start == s.start);
    CHECK(again[0].end == s.end);
  }
}

TEST_CASE("monotonicity: smaller gap threshold never merges shifts") {
  Rng rng(99);
  std::vector<TripRecord> trips;
  Timestamp t = kBase;
  for (int i = 0; i < 60; ++i) {
    Timestamp duration = 60 + static_cast<Timestamp>(rng.below(1800));
    trips.push_back(trip_at(t, t + duration));
    t += duration + static_cast<Timestamp>(rng.below(12 * 3600));
  }
  std::size_t previous = 0;
  for (std::int64_t hours = 12; hours >= 1; --hours) {
    GapPolicy policy;
    policy.gap_threshold_s = hours * 3600;
    std::size_t count = synthesize_shifts("D1", trips, policy).size();
    CHECK(count >= previous);
    previous = count;
  }
}

TEST_CASE("empty_intervals") {
  SUBCASE("same-point relocation is zero") {
    std::vector<TripRecord> trips = {
        trip_at(kBase, kBase + 3600),
        trip_at(kBase + 3600 + 720, kBase + 3600 + 1320),
    };
    auto shifts = synthesize_shifts("D1", trips);
    REQUIRE(shifts.size() == 1);
    auto intervals = empty_intervals(shifts[0]);
    REQUIRE(intervals.size() == 1);
    CHECK(intervals[0].gap_seconds == 720);
    CHECK(intervals[0].relocation_km == doctest::Approx(0.0));
  }
  SUBCASE("singleton shift has none") {
    auto shifts = synthesize_shifts("D1", {trip_at(kBase, kBase + 60)});
    CHECK(empty_intervals(shifts[0]).empty());
  }
  SUBCASE("gaps are reported in order") {
    std::vector<TripRecord> trips = {
        trip_at(kBase, kBase + 600),
        trip_at(kBase + 600 + 300, kBase + 600 + 900),
        trip_at(kBase + 1500 + 1200, kBase + 1500 + 1800),
    };
    auto shifts = synthesize_shifts("D1", trips);
    auto intervals = empty_intervals(shifts[0]);
    REQUIRE(intervals.size() == 2);
    CHECK(intervals[0].gap_seconds == 300);
    CHECK(intervals[1].gap_seconds == 1200);
  }
  SUBCASE("back-to-back trips are excluded") {
    std::vector<TripRecord> trips = {
        trip_at(kBase, kBase + 600),
        trip_at(kBase + 600, kBase + 1200),
    };
    auto shifts = synthesize_shifts("D1", trips);
    CHECK(empty_intervals(shifts[0]).empty());
  }
}

TEST_CASE("synthesize_all_shifts groups by the configured identity") {
  std::vector<TripRecord> trips;
  auto a = trip_at(kBase, kBase + 600, "DA");
  auto b = trip_at(kBase + 100, kBase + 700, "DB");
  b.medallion = "M1";  // same cab, different drivers
  trips = {a, b};
  auto by_driver = synthesize_all_shifts(trips, DriverIdentity::hack_license);
  CHECK(by_driver.size() == 2);
  auto by_cab = synthesize_all_shifts(trips, DriverIdentity::medallion);
  CHECK(by_cab.size() == 1);  // overlap resolved within the medallion
}

TEST_CASE("shift time densities") {
  SUBCASE("mass lands in the right bin and sums to one") {
    std::vector<Shift> shifts(2);
    shifts[0].start = make_timestamp(2013, 6, 3, 6, 10);
    shifts[0].end = make_timestamp(2013, 6, 3, 14, 0);
    shifts[1].start = make_timestamp(2013, 6, 3, 6, 20);
    shifts[1].end = make_timestamp(2013, 6, 3, 15, 0);
    auto densities = shift_time_densities(shifts, 30);
    CHECK(densities.start.mass[12] == doctest::Approx(1.0));  // 06:00-06:30
    double total = 0.0;
    for (double m : densities.start.mass) total += m;
    CHECK(total == doctest::Approx(1.0));
  }
  SUBCASE("empty input throws") {
    std::vector<Shift> none;
    CHECK_THROWS_WITH_AS(shift_time_densities(none, 30), "no shifts", std::invalid_argument);
  }
  SUBCASE("uniform starts look flat under a chi-squared check") {
    Rng rng(515);
    std::vector<int> minutes;
    for (int i = 0; i < 20000; ++i) minutes.push_back(static_cast<int>(rng.below(1440)));
    auto h = time_of_day_histogram(minutes, 30);
    double chi2 = 0.0;
    double expected = 20000.0 / static_cast<double>(h.mass.size());
    for (double m : h.mass) {
      double observed = m * 20000.0;
      chi2 += (observed - expected) * (observed - expected) / expected;
    }
    double p = chi_squared_sf(chi2, static_cast<int>(h.mass.size()) - 1);
    CHECK(p > 0.01);  // uniformity not rejected at alpha = 0.01
  }
}
