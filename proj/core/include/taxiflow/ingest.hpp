#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "taxiflow/geo.hpp"
#include "taxiflow/time_util.hpp"

namespace taxiflow {

// One completed ride distilled to the ten fields the analyses use.
struct TripRecord {
  std::string medallion;
  std::string hack_license;
  Timestamp pickup_time = 0;
  Timestamp dropoff_time = 0;
  GeoPoint pickup;
  GeoPoint dropoff;
  double trip_distance_km = 0.0;
  double fare_total = 0.0;

  std::int64_t duration_s() const { return dropoff_time - pickup_time; }
};

enum class CanonicalField : int {
  medallion = 0,
  hack_license,
  pickup_time,
  dropoff_time,
  pickup_lat,
  pickup_lon,
  dropoff_lat,
  dropoff_lon,
  trip_distance,
  fare_total,
};
inline constexpr int kCanonicalFieldCount = 10;
std::string_view canonical_field_name(CanonicalField f);

enum class DistanceUnit { km, mi };

// Maps each canonical field to a source column name and declares the
// distance unit carried by the files.
struct Schema {
  std::array<std::string, kCanonicalFieldCount> columns;
  DistanceUnit distance_unit = DistanceUnit::km;

  // Identity mapping: canonical names, kilometers. This is the layout of the
  // canonical trip store written by the ingest command.
  static Schema canonical();
  // key=value config file; keys are canonical field names plus distance_unit.
  static Schema load(const std::string& path);
};

// Column indices resolved against a concrete header row.
struct ColumnMap {
  std::array<int, kCanonicalFieldCount> index;
  int min_columns = 0;

  // Throws IngestError when a required column is absent.
  static ColumnMap resolve(const Schema& schema, std::span<const std::string_view> header);
};

struct TripLimits {
  std::int64_t min_duration_s = 1;
  std::int64_t max_duration_s = 6 * 3600;
  double min_distance_km = 0.0;
  double max_distance_km = 160.0;
};

struct IngestReport {
  std::uint64_t rows_read = 0;
  std::uint64_t rows_accepted = 0;
  std::map<std::string, std::uint64_t> rows_rejected_by_reason;

  std::uint64_t rows_rejected() const;
  void add_rejection(std::string_view reason);
  void merge(const IngestReport& other);
};

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses one delimited row into a TripRecord. On failure returns false and
// sets reason to a stable category string. Units are normalized here:
// distances declared in miles are converted to kilometers.
bool parse_trip_row(std::span<const std::string_view> fields, const ColumnMap& columns,
                    DistanceUnit unit, TripRecord& out, const char** reason);

// Returns nullptr when accepted, otherwise the rejection reason. Rejection is
// a value, not an error: anomalous rows are expected in the source data.
const char* validate_trip(const TripRecord& trip, const BoundingBox& bbox, const TripLimits& limits);

struct StreamOptions {
  std::size_t chunk_rows = 1 << 16;
  int threads = 1;  // >1 parses chunks concurrently; emission order is unchanged
  std::string reject_log_path;  // optional sidecar: row_number,reason per rejection
};

using TripSink = std::function<void(const TripRecord&)>;

// Streams accepted records from the given files in order, with memory bounded
// by chunk_rows * threads rows. Throws IngestError for unreadable files or a
// header that does not satisfy the schema.
IngestReport stream_trips(std::span<const std::string> paths, const Schema& schema,
                          const BoundingBox& bbox, const TripLimits& limits, const TripSink& sink,
                          const StreamOptions& options = {});

// Reads every accepted trip into memory. Convenience for desk-scale inputs.
std::vector<TripRecord> read_trips(std::span<const std::string> paths, const Schema& schema,
                                   const BoundingBox& bbox, const TripLimits& limits,
                                   IngestReport* report = nullptr, const StreamOptions& options = {});

// Canonical store emission: header plus one row per trip in sink order.
std::string canonical_header();
void append_canonical_row(std::string& out, const TripRecord& trip);

}  // namespace taxiflow
