#include <benchmark/benchmark.h>

#include <vector>

#include "taxiflow/csv.hpp"
#include "taxiflow/geo.hpp"
#include "taxiflow/ingest.hpp"
#include "taxiflow/metrics.hpp"
#include "taxiflow/rng.hpp"
#include "taxiflow/shifts.hpp"

using namespace taxiflow;

namespace {

std::vector<std::string> make_rows(std::size_t n) {
  std::vector<std::string> rows;
  rows.reserve(n);
  Rng rng(5);
  Timestamp t = make_timestamp(2013, 2, 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::string row;
    char ids[32];
    std::snprintf(ids, sizeof(ids), "M%04zu,D%05zu,", (i % 700) / 2, i % 700);
    row += ids;
    row += format_timestamp(t);
    row += ',';
    row += format_timestamp(t + 600);
    row += ",40.75,-73.98,40.76,-73.97,2.5,11.5";
    rows.push_back(std::move(row));
    t += 60 + static_cast<Timestamp>(rng.below(600));
  }
  return rows;
}

ColumnMap canonical_columns() {
  static std::string header = canonical_header();
  std::vector<std::string_view> fields;
  split_fields(header, ',', fields);
  return ColumnMap::resolve(Schema::canonical(), fields);
}

std::vector<TripRecord> make_trips(std::size_t n) {
  std::vector<TripRecord> trips;
  trips.reserve(n);
  Rng rng(17);
  const Timestamp base = make_timestamp(2013, 2, 1);
  for (std::size_t i = 0; i < n; ++i) {
    TripRecord trip;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "D%05zu", i % 300);
    trip.hack_license = buf;
    std::snprintf(buf, sizeof(buf), "M%04zu", (i % 300) / 2);
    trip.medallion = buf;
    trip.pickup_time = base + static_cast<Timestamp>(rng.below(14 * 86400));
    trip.dropoff_time = trip.pickup_time + 300 + static_cast<Timestamp>(rng.below(1500));
    trip.pickup = {40.70 + rng.uniform() * 0.2, -74.0 + rng.uniform() * 0.2};
    trip.dropoff = trip.pickup;
    trip.trip_distance_km = rng.uniform(0.5, 12.0);
    trip.fare_total = 2.5 + trip.trip_distance_km * 1.56;
    trips.push_back(std::move(trip));
  }
  return trips;
}

}  // namespace

static void BM_ParseTripRow(benchmark::State& state) {
  auto rows = make_rows(4096);
  ColumnMap columns = canonical_columns();
  std::vector<std::string_view> fields;
  TripRecord trip;
  const char* reason = nullptr;
  std::size_t i = 0;
  for (auto _ : state) {
    split_fields(rows[i % rows.size()], ',', fields);
    benchmark::DoNotOptimize(parse_trip_row(fields, columns, DistanceUnit::km, trip, &reason));
    ++i;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_ParseTripRow);

static void BM_ParseTimestamp(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(parse_timestamp("2013-06-07 14:23:45"));
}
BENCHMARK(BM_ParseTimestamp);

static void BM_Haversine(benchmark::State& state) {
  GeoPoint a{40.779, -73.969}, b{40.639, -73.764};
  for (auto _ : state) benchmark::DoNotOptimize(haversine_km(a, b));
}
BENCHMARK(BM_Haversine);

static void BM_SynthesizeShifts(benchmark::State& state) {
  auto trips = make_trips(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto copy = trips;
    benchmark::DoNotOptimize(synthesize_all_shifts(std::move(copy)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SynthesizeShifts)->Arg(10000)->Arg(100000);

static void BM_BinAggregation(benchmark::State& state) {
  auto trips = make_trips(static_cast<std::size_t>(state.range(0)));
  AggregationOptions options;
  for (auto _ : state) {
    BinTable table;
    for (const TripRecord& trip : trips) table.add_trip(trip, options);
    benchmark::DoNotOptimize(table.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BinAggregation)->Arg(10000)->Arg(100000);
