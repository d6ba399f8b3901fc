#include "taxiflow/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <utility>

#include "taxiflow/csv.hpp"

namespace taxiflow {

namespace {

constexpr double kKmPerMile = 1.609344;

constexpr std::array<std::string_view, kCanonicalFieldCount> kFieldNames = {
    "medallion",   "hack_license", "pickup_time", "dropoff_time",  "pickup_lat",
    "pickup_lon",  "dropoff_lat",  "dropoff_lon", "trip_distance", "fare_total",
};

const char* const kReasonMissingColumn = "missing column";
const char* const kReasonBadTimestamp = "malformed timestamp";
const char* const kReasonBadCoordinate = "non-numeric coordinate";
const char* const kReasonBadDistance = "non-numeric distance";
const char* const kReasonBadFare = "non-numeric fare";
const char* const kReasonNegativeDistance = "negative distance";
const char* const kReasonNegativeFare = "negative fare";
const char* const kReasonNegativeDuration = "negative duration";

}  // namespace

std::string_view canonical_field_name(CanonicalField f) {
  return kFieldNames[static_cast<int>(f)];
}

Schema Schema::canonical() {
  Schema s;
  for (int i = 0; i < kCanonicalFieldCount; ++i) s.columns[i] = std::string(kFieldNames[i]);
  s.distance_unit = DistanceUnit::km;
  return s;
}

Schema Schema::load(const std::string& path) {
  LineReader reader(path);
  if (!reader.is_open()) throw IngestError("cannot open schema config: " + path);
  Schema s = Schema::canonical();
  std::string_view line;
  while (reader.next(line)) {
    line = trim(line);
    if (line.empty() || LineReader::is_comment(line)) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw IngestError("schema config: expected key=value, got '" + std::string(line) + "'");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key == "distance_unit") {
      if (value == "km") {
        s.distance_unit = DistanceUnit::km;
      } else if (value == "mi") {
        s.distance_unit = DistanceUnit::mi;
      } else {
        throw IngestError("schema config: distance_unit must be km or mi");
      }
      continue;
    }
    bool known = false;
    for (int i = 0; i < kCanonicalFieldCount; ++i) {
      if (key == kFieldNames[i]) {
        s.columns[i] = std::string(value);
        known = true;
        break;
      }
    }
    if (!known) throw IngestError("schema config: unknown key '" + std::string(key) + "'");
  }
  return s;
}

ColumnMap ColumnMap::resolve(const Schema& schema, std::span<const std::string_view> header) {
  ColumnMap map;
  map.index.fill(-1);
  for (int i = 0; i < kCanonicalFieldCount; ++i) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (trim(header[c]) == schema.columns[i]) {
        map.index[i] = static_cast<int>(c);
        break;
      }
    }
    if (map.index[i] < 0)
      throw IngestError("header missing required column '" + schema.columns[i] + "'");
    map.min_columns = std::max(map.min_columns, map.index[i] + 1);
  }
  return map;
}

std::uint64_t IngestReport::rows_rejected() const {
  std::uint64_t n = 0;
  for (const auto& [_, count] : rows_rejected_by_reason) n += count;
  return n;
}

void IngestReport::add_rejection(std::string_view reason) {
  auto it = rows_rejected_by_reason.find(std::string(reason));
  if (it == rows_rejected_by_reason.end()) {
    rows_rejected_by_reason.emplace(std::string(reason), 1);
  } else {
    ++it->second;
  }
}

void IngestReport::merge(const IngestReport& other) {
  rows_read += other.rows_read;
  rows_accepted += other.rows_accepted;
  for (const auto& [reason, count] : other.rows_rejected_by_reason)
    rows_rejected_by_reason[reason] += count;
}

bool parse_trip_row(std::span<const std::string_view> fields, const ColumnMap& columns,
                    DistanceUnit unit, TripRecord& out, const char** reason) {
  if (static_cast<int>(fields.size()) < columns.min_columns) {
    *reason = kReasonMissingColumn;
    return false;
  }
  auto field = [&](CanonicalField f) { return fields[columns.index[static_cast<int>(f)]]; };

  auto pickup = parse_timestamp(trim(field(CanonicalField::pickup_time)));
  auto dropoff = parse_timestamp(trim(field(CanonicalField::dropoff_time)));
  if (!pickup || !dropoff) {
    *reason = kReasonBadTimestamp;
    return false;
  }
  GeoPoint pu, do_;
  if (!parse_double(field(CanonicalField::pickup_lat), pu.lat) ||
      !parse_double(field(CanonicalField::pickup_lon), pu.lon) ||
      !parse_double(field(CanonicalField::dropoff_lat), do_.lat) ||
      !parse_double(field(CanonicalField::dropoff_lon), do_.lon)) {
    *reason = kReasonBadCoordinate;
    return false;
  }
  double distance, fare;
  if (!parse_double(field(CanonicalField::trip_distance), distance)) {
    *reason = kReasonBadDistance;
    return false;
  }
  if (!parse_double(field(CanonicalField::fare_total), fare)) {
    *reason = kReasonBadFare;
    return false;
  }
  if (distance < 0.0) {
    *reason = kReasonNegativeDistance;
    return false;
  }
  if (fare < 0.0) {
    *reason = kReasonNegativeFare;
    return false;
  }
  if (*dropoff < *pickup) {
    *reason = kReasonNegativeDuration;
    return false;
  }
  out.medallion.assign(field(CanonicalField::medallion));
  out.hack_license.assign(field(CanonicalField::hack_license));
  out.pickup_time = *pickup;
  out.dropoff_time = *dropoff;
  out.pickup = pu;
  out.dropoff = do_;
  out.trip_distance_km = unit == DistanceUnit::mi ? distance * kKmPerMile : distance;
  out.fare_total = fare;
  return true;
}

const char* validate_trip(const TripRecord& trip, const BoundingBox& bbox, const TripLimits& limits) {
  if (!bbox.contains(trip.pickup) || !bbox.contains(trip.dropoff)) return "out of bounding box";
  std::int64_t duration = trip.duration_s();
  if (duration < limits.min_duration_s || duration > limits.max_duration_s)
    return "duration out of range";
  if (trip.trip_distance_km < limits.min_distance_km || trip.trip_distance_km > limits.max_distance_km)
    return "distance out of range";
  return nullptr;
}

namespace {

struct Chunk {
  std::vector<std::string> lines;
  std::vector<std::uint64_t> numbers;  // physical line numbers, parallel to lines

  void clear() {
    lines.clear();
    numbers.clear();
  }
};

struct ChunkResult {
  std::vector<TripRecord> accepted;
  IngestReport report;
  std::vector<std::pair<std::uint64_t, const char*>> rejections;  // line number, reason
};

ChunkResult parse_chunk(const Chunk& chunk, const ColumnMap& columns, DistanceUnit unit,
                        const BoundingBox& bbox, const TripLimits& limits) {
  ChunkResult result;
  result.accepted.reserve(chunk.lines.size());
  std::vector<std::string_view> fields;
  TripRecord trip;
  for (std::size_t i = 0; i < chunk.lines.size(); ++i) {
    result.report.rows_read += 1;
    split_fields(chunk.lines[i], ',', fields);
    const char* reason = nullptr;
    if (!parse_trip_row(fields, columns, unit, trip, &reason)) {
      result.report.add_rejection(reason);
      result.rejections.emplace_back(chunk.numbers[i], reason);
      continue;
    }
    if (const char* rejected = validate_trip(trip, bbox, limits)) {
      result.report.add_rejection(rejected);
      result.rejections.emplace_back(chunk.numbers[i], rejected);
      continue;
    }
    result.accepted.push_back(trip);
  }
  return result;
}

}  // namespace

IngestReport stream_trips(std::span<const std::string> paths, const Schema& schema,
                          const BoundingBox& bbox, const TripLimits& limits, const TripSink& sink,
                          const StreamOptions& options) {
  IngestReport total;
  std::ofstream reject_log;
  if (!options.reject_log_path.empty()) {
    reject_log.open(options.reject_log_path);
    if (!reject_log) throw IngestError("cannot open reject log: " + options.reject_log_path);
  }
  const std::size_t chunk_rows = std::max<std::size_t>(1, options.chunk_rows);
  const int threads = std::max(1, options.threads);

  for (const std::string& path : paths) {
    LineReader reader(path);
    if (!reader.is_open()) throw IngestError("cannot open trip file: " + path);
    std::string_view line;
    // Header is required; comment lines (manifest stamps) may precede it.
    bool have_header = false;
    std::vector<std::string_view> header_fields;
    while (reader.next(line)) {
      if (LineReader::is_comment(line)) continue;
      split_fields(line, ',', header_fields);
      have_header = true;
      break;
    }
    if (!have_header) throw IngestError("empty trip file (no header): " + path);
    ColumnMap columns = ColumnMap::resolve(schema, header_fields);

    auto flush = [&](ChunkResult&& chunk) {
      total.merge(chunk.report);
      if (reject_log.is_open()) {
        std::string buf;
        for (const auto& [row, reason] : chunk.rejections) {
          append_i64(buf, static_cast<std::int64_t>(row));
          buf += ',';
          buf += reason;
          buf += '\n';
        }
        reject_log << buf;
      }
      total.rows_accepted += chunk.accepted.size();
      for (const TripRecord& trip : chunk.accepted) sink(trip);
    };

    auto read_chunk = [&](Chunk& chunk) {
      chunk.clear();
      while (chunk.lines.size() < chunk_rows && reader.next(line)) {
        if (line.empty() || LineReader::is_comment(line)) continue;
        chunk.lines.emplace_back(line);
        chunk.numbers.push_back(reader.line_number());
      }
      return !chunk.lines.empty();
    };

    if (threads == 1) {
      Chunk chunk;
      while (read_chunk(chunk))
        flush(parse_chunk(chunk, columns, schema.distance_unit, bbox, limits));
    } else {
      // Round-robin chunk dispatch; chunks are joined in order so emission
      // matches the sequential path exactly.
      std::vector<std::future<ChunkResult>> pending;
      std::vector<Chunk> buffers(static_cast<std::size_t>(threads));
      bool more = true;
      while (more) {
        pending.clear();
        for (int t = 0; t < threads && more; ++t) {
          if (!read_chunk(buffers[static_cast<std::size_t>(t)])) {
            more = false;
            break;
          }
          pending.push_back(std::async(std::launch::async, [&, t] {
            return parse_chunk(buffers[static_cast<std::size_t>(t)], columns,
                               schema.distance_unit, bbox, limits);
          }));
        }
        for (auto& f : pending) flush(f.get());
      }
    }
  }
  return total;
}

std::vector<TripRecord> read_trips(std::span<const std::string> paths, const Schema& schema,
                                   const BoundingBox& bbox, const TripLimits& limits,
                                   IngestReport* report, const StreamOptions& options) {
  std::vector<TripRecord> trips;
  IngestReport r = stream_trips(
      paths, schema, bbox, limits, [&](const TripRecord& t) { trips.push_back(t); }, options);
  if (report != nullptr) *report = r;
  return trips;
}

std::string canonical_header() {
  std::string h;
  for (int i = 0; i < kCanonicalFieldCount; ++i) {
    if (i > 0) h += ',';
    h += kFieldNames[i];
  }
  return h;
}

void append_canonical_row(std::string& out, const TripRecord& trip) {
  out += trip.medallion;
  out += ',';
  out += trip.hack_license;
  out += ',';
  out += format_timestamp(trip.pickup_time);
  out += ',';
  out += format_timestamp(trip.dropoff_time);
  out += ',';
  append_double(out, trip.pickup.lat);
  out += ',';
  append_double(out, trip.pickup.lon);
  out += ',';
  append_double(out, trip.dropoff.lat);
  out += ',';
  append_double(out, trip.dropoff.lon);
  out += ',';
  append_double(out, trip.trip_distance_km);
  out += ',';
  append_double(out, trip.fare_total);
  out += '\n';
}

}  // namespace taxiflow
