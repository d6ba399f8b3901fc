#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "taxiflow/csv.hpp"
#include "taxiflow/ingest.hpp"
#include "taxiflow/metrics.hpp"

using namespace taxiflow;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string name, const std::string& content) : path(std::move(name)) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const std::string kHeader =
    "medallion,hack_license,pickup_time,dropoff_time,pickup_lat,pickup_lon,"
    "dropoff_lat,dropoff_lon,trip_distance,fare_total\n";

std::string row(const std::string& pickup, const std::string& dropoff,
                const std::string& lat = "40.75", const std::string& lon = "-73.98",
                const std::string& dist = "3.0", const std::string& fare = "10.5") {
  return "M1,D1," + pickup + "," + dropoff + "," + lat + "," + lon + "," + lat + "," + lon + "," +
         dist + "," + fare + "\n";
}

std::vector<std::string_view> split(const std::string& line) {
  std::vector<std::string_view> fields;
  split_fields(line, ',', fields);
  return fields;
}

ColumnMap canonical_columns() {
  std::string header = kHeader.substr(0, kHeader.size() - 1);
  static std::string held;
  held = header;
  std::vector<std::string_view> fields;
  split_fields(held, ',', fields);
  return ColumnMap::resolve(Schema::canonical(), fields);
}

}  // namespace

TEST_CASE("parse_trip_row maps fields and converts units") {
  ColumnMap columns = canonical_columns();
  std::string line = row("2013-03-08 07:15:00", "2013-03-08 07:28:00");
  line.pop_back();
  auto fields = split(line);
  TripRecord trip;
  const char* reason = nullptr;
  REQUIRE(parse_trip_row(fields, columns, DistanceUnit::km, trip, &reason));
  CHECK(trip.duration_s() == 13 * 60);
  CHECK(trip.trip_distance_km == 3.0);
  CHECK(trip.fare_total == 10.5);
  CHECK(trip.medallion == "M1");

  REQUIRE(parse_trip_row(fields, columns, DistanceUnit::mi, trip, &reason));
  CHECK(trip.trip_distance_km == doctest::Approx(3.0 * 1.609344));
}

TEST_CASE("parse_trip_row categorizes failures") {
  ColumnMap columns = canonical_columns();
  TripRecord trip;
  const char* reason = nullptr;

  std::string negative = row("2013-03-08 07:28:00", "2013-03-08 07:15:00");
  negative.pop_back();
  auto fields = split(negative);
  CHECK_FALSE(parse_trip_row(fields, columns, DistanceUnit::km, trip, &reason));
  CHECK(std::string(reason) == "negative duration");

  std::string bad_coord = row("2013-03-08 07:15:00", "2013-03-08 07:28:00", "40.75", "abc");
  bad_coord.pop_back();
  fields = split(bad_coord);
  CHECK_FALSE(parse_trip_row(fields, columns, DistanceUnit::km, trip, &reason));
  CHECK(std::string(reason) == "non-numeric coordinate");

  std::string bad_time = row("2013-03-08 7:15:00", "2013-03-08 07:28:00");
  bad_time.pop_back();
  fields = split(bad_time);
  CHECK_FALSE(parse_trip_row(fields, columns, DistanceUnit::km, trip, &reason));
  CHECK(std::string(reason) == "malformed timestamp");

  std::vector<std::string_view> short_row = {"M1", "D1"};
  CHECK_FALSE(parse_trip_row(short_row, columns, DistanceUnit::km, trip, &reason));
  CHECK(std::string(reason) == "missing column");
}

TEST_CASE("validate_trip applies bbox and limits") {
  TripLimits limits;
  BoundingBox bbox = BoundingBox::nyc();
  TripRecord trip;
  trip.pickup = trip.dropoff = {40.75, -73.98};
  trip.pickup_time = make_timestamp(2013, 3, 8, 7, 15);
  trip.dropoff_time = trip.pickup_time + 13 * 60;
  trip.trip_distance_km = 3.0;
  CHECK(validate_trip(trip, bbox, limits) == nullptr);

  TripRecord null_island = trip;
  null_island.pickup = {0.0, 0.0};
  CHECK(std::string(validate_trip(null_island, bbox, limits)) == "out of bounding box");

  TripRecord marathon = trip;
  marathon.dropoff_time = marathon.pickup_time + 30LL * 24 * 3600;  // the 30-day anomaly
  CHECK(std::string(validate_trip(marathon, bbox, limits)) == "duration out of range");

  TripRecord instant = trip;
  instant.dropoff_time = instant.pickup_time;
  CHECK(std::string(validate_trip(instant, bbox, limits)) == "duration out of range");

  TripRecord cross_country = trip;
  cross_country.trip_distance_km = 500.0;
  CHECK(std::string(validate_trip(cross_country, bbox, limits)) == "distance out of range");
}

TEST_CASE("stream_trips counts reconcile across files") {
  TempFile a("ingest_a.csv", kHeader + row("2013-03-08 07:00:00", "2013-03-08 07:10:00") +
                                 row("2013-03-08 08:00:00", "2013-03-08 08:10:00") +
                                 row("2013-03-08 09:00:00", "2013-03-08 09:10:00"));
  TempFile b("ingest_b.csv", kHeader + row("2013-03-09 07:00:00", "2013-03-09 07:10:00") +
                                 row("2013-03-09 08:00:00", "2013-03-09 08:10:00") +
                                 row("2013-03-09 09:00:00", "2013-03-09 09:10:00"));
  std::vector<std::string> paths = {a.path, b.path};
  std::vector<TripRecord> trips;
  IngestReport report = stream_trips(
      paths, Schema::canonical(), BoundingBox::nyc(), TripLimits{},
      [&](const TripRecord& t) { trips.push_back(t); });
  CHECK(report.rows_read == 6);
  CHECK(report.rows_accepted == 6);
  CHECK(report.rows_rejected() == 0);
  CHECK(trips.size() == 6);
  CHECK(trips.front().pickup_time < trips.back().pickup_time);
}

TEST_CASE("stream_trips rejects malformed rows and logs them") {
  TempFile file("ingest_bad.csv",
                kHeader + row("2013-03-08 07:00:00", "2013-03-08 07:10:00") +
                    "M1,D1,garbage,2013-03-08 07:28:00,40.75,-73.98,40.75,-73.98,3.0,10.5\n" +
                    row("2013-03-08 08:00:00", "2013-03-08 08:10:00"));
  std::vector<std::string> paths = {file.path};
  StreamOptions options;
  options.reject_log_path = "ingest_bad_rejects.csv";
  std::size_t count = 0;
  IngestReport report = stream_trips(paths, Schema::canonical(), BoundingBox::nyc(), TripLimits{},
                                     [&](const TripRecord&) { ++count; }, options);
  CHECK(report.rows_read == 3);
  CHECK(report.rows_accepted == 2);
  CHECK(report.rows_rejected_by_reason.size() == 1);
  CHECK(report.rows_rejected_by_reason.at("malformed timestamp") == 1);
  CHECK(count == 2);
  {
    std::ifstream log(options.reject_log_path);
    std::string line;
    REQUIRE(std::getline(log, line));
    CHECK(line == "3,malformed timestamp");  // physical line number
  }
  std::remove(options.reject_log_path.c_str());
}

TEST_CASE("stream_trips handles header-only and missing files") {
  TempFile empty("ingest_empty.csv", kHeader);
  std::vector<std::string> paths = {empty.path};
  IngestReport report =
      stream_trips(paths, Schema::canonical(), BoundingBox::nyc(), TripLimits{}, [](const TripRecord&) {});
  CHECK(report.rows_read == 0);
  CHECK(report.rows_accepted == 0);

  std::vector<std::string> missing = {"does_not_exist.csv"};
  CHECK_THROWS_AS(stream_trips(missing, Schema::canonical(), BoundingBox::nyc(), TripLimits{},
                               [](const TripRecord&) {}),
                  IngestError);
}

TEST_CASE("header missing a schema column throws") {
  TempFile file("ingest_hdr.csv", "medallion,hack_license\nM1,D1\n");
  std::vector<std::string> paths = {file.path};
  CHECK_THROWS_AS(stream_trips(paths, Schema::canonical(), BoundingBox::nyc(), TripLimits{},
                               [](const TripRecord&) {}),
                  IngestError);
}

TEST_CASE("schema config remaps columns and declares miles") {
  TempFile schema_file("schema_test.cfg",
                       "pickup_time = pickup_datetime\n"
                       "dropoff_time = dropoff_datetime\n"
                       "trip_distance = trip_miles\n"
                       "distance_unit = mi\n");
  Schema schema = Schema::load(schema_file.path);
  CHECK(schema.columns[static_cast<int>(CanonicalField::pickup_time)] == "pickup_datetime");
  CHECK(schema.columns[static_cast<int>(CanonicalField::medallion)] == "medallion");
  CHECK(schema.distance_unit == DistanceUnit::mi);

  TempFile data("ingest_mi.csv",
                "medallion,hack_license,pickup_datetime,dropoff_datetime,pickup_lat,pickup_lon,"
                "dropoff_lat,dropoff_lon,trip_miles,fare_total,extra\n"
                "M1,D1,2013-03-08 07:15:00,2013-03-08 07:28:00,40.75,-73.98,40.75,-73.98,2.0,10.5,zz\n");
  std::vector<std::string> paths = {data.path};
  std::vector<TripRecord> trips;
  stream_trips(paths, schema, BoundingBox::nyc(), TripLimits{},
               [&](const TripRecord& t) { trips.push_back(t); });
  REQUIRE(trips.size() == 1);
  CHECK(trips[0].trip_distance_km == doctest::Approx(2.0 * 1.609344));
}

TEST_CASE("parallel chunked ingestion equals sequential") {
  std::string content = kHeader;
  for (int i = 0; i < 1000; ++i) {
    int minute = i % 60;
    int hour = 6 + (i / 60) % 12;
    char pickup[32], dropoff[32];
    std::snprintf(pickup, sizeof(pickup), "2013-03-%02d %02d:%02d:00", 1 + i % 28, hour, minute);
    std::snprintf(dropoff, sizeof(dropoff), "2013-03-%02d %02d:%02d:30", 1 + i % 28, hour, minute);
    content += row(pickup, dropoff);
    if (i % 97 == 0) content += row("2013-03-08 07:00:00", "bad", "40.75", "-73.98");
  }
  TempFile file("ingest_par.csv", content);
  std::vector<std::string> paths = {file.path};

  StreamOptions seq;
  seq.chunk_rows = 64;
  std::vector<TripRecord> sequential;
  IngestReport report_seq = stream_trips(paths, Schema::canonical(), BoundingBox::nyc(), TripLimits{},
                                         [&](const TripRecord& t) { sequential.push_back(t); }, seq);

  StreamOptions par;
  par.chunk_rows = 64;
  par.threads = 4;
  std::vector<TripRecord> parallel;
  IngestReport report_par = stream_trips(paths, Schema::canonical(), BoundingBox::nyc(), TripLimits{},
                                         [&](const TripRecord& t) { parallel.push_back(t); }, par);

  CHECK(report_seq.rows_read == report_par.rows_read);
  CHECK(report_seq.rows_accepted == report_par.rows_accepted);
  CHECK(report_seq.rows_rejected_by_reason == report_par.rows_rejected_by_reason);
  REQUIRE(sequential.size() == parallel.size());
  for (std::size_t i = 0; i < sequential.size(); ++i) {
    CHECK(sequential[i].pickup_time == parallel[i].pickup_time);
    CHECK(sequential[i].fare_total == parallel[i].fare_total);
  }
}

TEST_CASE("file order does not change downstream aggregates") {
  TempFile a("order_a.csv", kHeader + row("2013-03-08 07:00:00", "2013-03-08 07:10:00") +
                                row("2013-03-08 08:00:00", "2013-03-08 08:12:00", "40.80", "-73.95",
                                    "4.25", "17.35"));
  TempFile b("order_b.csv", kHeader + row("2013-03-08 07:30:00", "2013-03-08 07:44:00", "40.72",
                                          "-73.99", "2.75", "9.15"));
  AggregationOptions agg;
  auto aggregate = [&](const std::vector<std::string>& paths) {
    BinTable table;
    stream_trips(paths, Schema::canonical(), BoundingBox::nyc(), TripLimits{},
                 [&](const TripRecord& t) { table.add_trip(t, agg); });
    return table;
  };
  BinTable forward = aggregate({a.path, b.path});
  BinTable backward = aggregate({b.path, a.path});
  CHECK(forward == backward);
}

TEST_CASE("canonical row round-trips through the parser") {
  TripRecord trip;
  trip.medallion = "M42";
  trip.hack_license = "D99";
  trip.pickup_time = make_timestamp(2013, 6, 7, 14, 5, 6);
  trip.dropoff_time = trip.pickup_time + 700;
  trip.pickup = {40.7512345, -73.9812345};
  trip.dropoff = {40.76, -73.97};
  trip.trip_distance_km = 3.217;
  trip.fare_total = 12.5;

  std::string content = canonical_header() + "\n";
  append_canonical_row(content, trip);
  TempFile file("ingest_rt.csv", content);
  std::vector<std::string> paths = {file.path};
  std::vector<TripRecord> trips;
  stream_trips(paths, Schema::canonical(), BoundingBox::nyc(), TripLimits{},
               [&](const TripRecord& t) { trips.push_back(t); });
  REQUIRE(trips.size() == 1);
  CHECK(trips[0].pickup_time == trip.pickup_time);
  CHECK(trips[0].pickup.lat == trip.pickup.lat);
  CHECK(trips[0].trip_distance_km == trip.trip_distance_km);
  CHECK(trips[0].fare_total == trip.fare_total);
}
