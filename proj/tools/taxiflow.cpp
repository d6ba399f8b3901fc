// taxiflow: batch pipeline from TLC-style trip CSVs plus hourly weather to
// shift reconstructions, supply/demand-mismatch indices, and rainy-vs-clear
// nonparametric tests. Every run writes a manifest; every CSV it produces is
// stamped with the manifest id, and reruns over identical inputs and seeds
// are byte-identical.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "taxiflow/comparison.hpp"
#include "taxiflow/csv.hpp"
#include "taxiflow/ingest.hpp"
#include "taxiflow/manifest.hpp"
#include "taxiflow/metrics.hpp"
#include "taxiflow/shifts.hpp"
#include "taxiflow/simulate.hpp"
#include "taxiflow/stats.hpp"
#include "taxiflow/svg.hpp"
#include "taxiflow/time_util.hpp"
#include "taxiflow/weather.hpp"
#include "taxiflow/windows.hpp"

namespace fs = std::filesystem;
using namespace taxiflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitData = 4;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BoundingBox parse_bbox(const std::string& text) {
  std::vector<std::string_view> parts;
  split_fields(text, ',', parts);
  BoundingBox bbox;
  if (parts.size() != 4 || !parse_double(parts[0], bbox.min_lat) ||
      !parse_double(parts[1], bbox.min_lon) || !parse_double(parts[2], bbox.max_lat) ||
      !parse_double(parts[3], bbox.max_lon) || !bbox.valid())
    throw DataError("bbox must be min_lat,min_lon,max_lat,max_lon");
  return bbox;
}

// Canonical stores were validated at ingest time; re-reads must not filter
// anything away.
BoundingBox everywhere() { return BoundingBox{-90.0, -180.0, 90.0, 180.0}; }

// Config files resolve against TAXIFLOW_CONFIG_DIR when not found as given.
std::string resolve_config(const std::string& path) {
  if (path.empty() || fs::exists(path)) return path;
  const char* dir = std::getenv("TAXIFLOW_CONFIG_DIR");
  if (dir != nullptr) {
    fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

TripLimits permissive_limits() {
  TripLimits limits;
  limits.min_duration_s = 1;
  limits.max_duration_s = 365LL * 24 * 3600;
  limits.max_distance_km = 1e9;
  return limits;
}

std::vector<TripRecord> load_store(const std::string& path) {
  std::vector<std::string> paths = {path};
  IngestReport report;
  std::vector<TripRecord> trips =
      read_trips(paths, Schema::canonical(), everywhere(), permissive_limits(), &report);
  if (trips.empty()) throw DataError("no usable data in trip store " + path);
  return trips;
}

void add_all_driver_shifts(BinTable& bins, std::span<const Shift> shifts,
                           const AggregationOptions& options) {
  for (std::size_t s = 0; s < shifts.size();) {
    std::size_t e = s;
    while (e < shifts.size() && shifts[e].driver == shifts[s].driver) ++e;
    bins.add_driver_shifts(shifts.subspan(s, e - s), options);
    s = e;
  }
}

void print_report(const IngestReport& report) {
  std::printf("rows read:     %llu\n", static_cast<unsigned long long>(report.rows_read));
  std::printf("rows accepted: %llu\n", static_cast<unsigned long long>(report.rows_accepted));
  std::printf("rows rejected: %llu\n", static_cast<unsigned long long>(report.rows_rejected()));
  for (const auto& [reason, count] : report.rows_rejected_by_reason)
    std::printf("  %-24s %llu\n", reason.c_str(), static_cast<unsigned long long>(count));
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> trips;
  std::string schema_path;
  std::string bbox_text = "40.45,-74.30,41.00,-73.60";
  std::string out;
  std::string reject_log;
  double max_duration_h = 6.0;
  double max_distance_km = 160.0;
  int threads = 1;
};

int cmd_ingest(const IngestArgs& args) {
  const std::string schema_path = resolve_config(args.schema_path);
  Schema schema = schema_path.empty() ? Schema::canonical() : Schema::load(schema_path);
  BoundingBox bbox = parse_bbox(args.bbox_text);
  TripLimits limits;
  limits.max_duration_s = static_cast<std::int64_t>(args.max_duration_h * 3600.0);
  limits.max_distance_km = args.max_distance_km;

  RunManifest manifest;
  manifest.command = "ingest";
  if (!schema_path.empty()) manifest.add_input(schema_path);
  for (const std::string& path : args.trips) manifest.add_input(path);
  manifest.params["bbox"] = args.bbox_text;
  manifest.params["max_duration_h"] = format_double(args.max_duration_h);
  manifest.params["max_distance_km"] = format_double(args.max_distance_km);
  const std::string id = manifest.id();

  if (fs::path(args.out).has_parent_path())
    fs::create_directories(fs::path(args.out).parent_path());
  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw IngestError("cannot open output store: " + args.out);
  out << manifest_stamp(id) << canonical_header() << '\n';

  StreamOptions options;
  options.threads = args.threads;
  options.reject_log_path = args.reject_log;
  std::string buffer;
  std::uint64_t written = 0;
  IngestReport report = stream_trips(args.trips, schema, bbox, limits,
                                     [&](const TripRecord& trip) {
                                       append_canonical_row(buffer, trip);
                                       if (buffer.size() > (1u << 20)) {
                                         out << buffer;
                                         buffer.clear();
                                       }
                                       ++written;
                                     },
                                     options);
  out << buffer;
  out.close();

  print_report(report);
  if (report.rows_accepted == 0) throw DataError("no usable data: every row was rejected");

  manifest.counters["rows_read"] = report.rows_read;
  manifest.counters["rows_accepted"] = report.rows_accepted;
  for (const auto& [reason, count] : report.rows_rejected_by_reason)
    manifest.counters["rejected: " + reason] = count;
  fs::path manifest_path = fs::path(args.out).parent_path() / "manifest.json";
  manifest.write(manifest_path.string());
  std::printf("store:         %s (%llu rows, manifest %s)\n", args.out.c_str(),
              static_cast<unsigned long long>(written), id.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// shifts
// ---------------------------------------------------------------------------

struct ShiftsArgs {
  std::string trips;
  std::string out_dir = ".";
  double gap_hours = 8.0;
  std::string identity = "hack";
  std::string overlap = "drop";
  int bin_minutes = 30;
};

int cmd_shifts(const ShiftsArgs& args) {
  RunManifest manifest;
  manifest.command = "shifts";
  manifest.add_input(args.trips);
  manifest.params["gap_hours"] = format_double(args.gap_hours);
  manifest.params["identity"] = args.identity;
  manifest.params["overlap"] = args.overlap;
  manifest.params["bin_minutes"] = std::to_string(args.bin_minutes);
  const std::string id = manifest.id();

  GapPolicy policy;
  policy.gap_threshold_s = static_cast<std::int64_t>(args.gap_hours * 3600.0);
  policy.overlap = args.overlap == "clip" ? OverlapPolicy::clip : OverlapPolicy::drop_later;
  DriverIdentity identity =
      args.identity == "medallion" ? DriverIdentity::medallion : DriverIdentity::hack_license;

  std::vector<TripRecord> trips = load_store(args.trips);
  SynthesisStats stats;
  std::vector<Shift> shifts = synthesize_all_shifts(std::move(trips), identity, policy, &stats);
  if (shifts.empty()) throw DataError("no shifts could be synthesized");

  fs::create_directories(args.out_dir);
  std::string shift_rows = shift_csv_header() + "\n";
  for (const Shift& shift : shifts) append_shift_csv_row(shift_rows, summarize(shift));
  write_stamped((fs::path(args.out_dir) / "shifts.csv").string(), id, shift_rows);

  ShiftTimeDensities densities = shift_time_densities(shifts, args.bin_minutes);
  write_stamped((fs::path(args.out_dir) / "shift_start_density.csv").string(), id,
                density_csv(densities.start));
  write_stamped((fs::path(args.out_dir) / "shift_end_density.csv").string(), id,
                density_csv(densities.end));

  manifest.counters["shifts"] = shifts.size();
  manifest.counters["overlaps_dropped"] = stats.overlaps_dropped;
  manifest.counters["overlaps_clipped"] = stats.overlaps_clipped;
  manifest.write((fs::path(args.out_dir) / "manifest.json").string());
  std::printf("shifts:        %zu (overlaps dropped %llu, clipped %llu)\n", shifts.size(),
              static_cast<unsigned long long>(stats.overlaps_dropped),
              static_cast<unsigned long long>(stats.overlaps_clipped));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string trips;
  std::string weather;
  std::string station_coords;
  std::string ref_station = "central_park";
  double rain_threshold = kDefaultRainThresholdMm;
  std::string windows_path;
  std::string out_dir = ".";
  double gap_hours = 8.0;
  std::string identity = "hack";
  std::string cell;  // "row,col" restricts comparisons to one grid cell
  double cell_size_m = 250.0;
  bool with_grid = false;
  bool fractional_supply = false;
  bool svg = false;
  unsigned min_slot_samples = 10;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const std::string station_coords = resolve_config(args.station_coords);
  const std::string windows_path = resolve_config(args.windows_path);
  RunManifest manifest;
  manifest.command = "analyze";
  manifest.add_input(args.trips);
  manifest.add_input(args.weather);
  if (!station_coords.empty()) manifest.add_input(station_coords);
  if (!windows_path.empty()) manifest.add_input(windows_path);
  manifest.params["ref_station"] = args.ref_station;
  manifest.params["rain_threshold"] = format_double(args.rain_threshold);
  manifest.params["gap_hours"] = format_double(args.gap_hours);
  manifest.params["identity"] = args.identity;
  manifest.params["cell"] = args.cell;
  manifest.params["cell_size_m"] = format_double(args.cell_size_m);
  manifest.params["fractional_supply"] = args.fractional_supply ? "1" : "0";
  manifest.params["min_slot_samples"] = std::to_string(args.min_slot_samples);
  const std::string id = manifest.id();

  StationSet stations =
      station_coords.empty() ? StationSet::nyc_default() : StationSet::load(station_coords);
  int ref = stations.index_of(args.ref_station);
  if (ref < 0) throw DataError("unknown reference station '" + args.ref_station + "'");
  WindowConfig windows = windows_path.empty() ? WindowConfig{} : WindowConfig::load(windows_path);

  std::vector<TripRecord> trips = load_store(args.trips);
  WeatherParseReport weather_report;
  std::vector<WeatherObservation> observations =
      parse_weather(args.weather, stations, &weather_report);
  if (observations.empty()) throw DataError("no usable weather observations");
  WeatherTable weather = classify_hours(observations, stations, ref, args.rain_threshold);

  GapPolicy policy;
  policy.gap_threshold_s = static_cast<std::int64_t>(args.gap_hours * 3600.0);
  DriverIdentity identity =
      args.identity == "medallion" ? DriverIdentity::medallion : DriverIdentity::hack_license;

  AggregationOptions agg;
  agg.windows = windows;
  agg.fractional_supply = args.fractional_supply;
  std::int32_t cell_filter = -1;
  if (args.with_grid || !args.cell.empty()) {
    // Grid extent from the data's own pickup bounding box.
    BoundingBox bbox{90.0, 180.0, -90.0, -180.0};
    for (const TripRecord& trip : trips) {
      bbox.min_lat = std::min(bbox.min_lat, trip.pickup.lat);
      bbox.max_lat = std::max(bbox.max_lat, trip.pickup.lat);
      bbox.min_lon = std::min(bbox.min_lon, trip.pickup.lon);
      bbox.max_lon = std::max(bbox.max_lon, trip.pickup.lon);
    }
    bbox.max_lat += 1e-6;
    bbox.max_lon += 1e-6;
    Grid grid{bbox, args.cell_size_m};
    agg.grid = grid;
    if (!args.cell.empty()) {
      std::vector<std::string_view> parts;
      split_fields(args.cell, ',', parts);
      std::int64_t row, col;
      if (parts.size() != 2 || !parse_i64(parts[0], row) || !parse_i64(parts[1], col))
        throw DataError("cell must be row,col");
      cell_filter =
          grid.flat_index(GridCell{static_cast<std::int32_t>(row), static_cast<std::int32_t>(col)});
    }
  }

  BinTable bins;
  for (const TripRecord& trip : trips) bins.add_trip(trip, agg);
  std::vector<Shift> shifts = synthesize_all_shifts(std::move(trips), identity, policy);
  add_all_driver_shifts(bins, shifts, agg);
  bins.finalize(weather, agg);

  fs::create_directories(args.out_dir);
  std::string bin_rows = bin_csv_header() + "\n";
  for (const HourlyBin* bin : bins.all_sorted()) append_bin_csv_row(bin_rows, *bin);
  write_stamped((fs::path(args.out_dir) / "bins.csv").string(), id, bin_rows);
  write_stamped((fs::path(args.out_dir) / "classified_weather.csv").string(), id,
                weather_table_csv(weather));

  CompareOptions compare;
  compare.min_slot_samples = args.min_slot_samples;
  compare.cell = cell_filter;
  ExclusionReport exclusions;
  std::vector<SlotComparison> comparison = compare_regimes(bins, weather, compare, &exclusions);
  write_stamped((fs::path(args.out_dir) / "comparisons.csv").string(), id,
                comparison_csv(comparison));

  std::string exclusion_rows = "reason,count\n";
  auto exclusion_row = [&](std::string_view reason, std::uint64_t count) {
    exclusion_rows += reason;
    exclusion_rows += ',';
    append_i64(exclusion_rows, static_cast<std::int64_t>(count));
    exclusion_rows += '\n';
  };
  exclusion_row("bins_no_weather", exclusions.bins_no_weather);
  exclusion_row("bins_zero_supply", exclusions.bins_zero_supply);
  exclusion_row("bins_zero_travel", exclusions.bins_zero_travel);
  exclusion_row("slots_masked", exclusions.slots_masked);
  exclusion_row("weather_duplicates", weather_report.duplicates);
  exclusion_row("weather_missing_values", weather_report.missing_values);
  write_stamped((fs::path(args.out_dir) / "exclusions.csv").string(), id, exclusion_rows);

  if (args.svg) {
    std::vector<std::string> hours;
    for (int h = 0; h < 24; ++h) hours.push_back(std::to_string(h));
    for (IndexKind kind : compare.indices) {
      SvgSeries clear_wd{"clear weekday", "#1f77b4", std::vector<std::optional<double>>(24)};
      SvgSeries rainy_wd{"rainy weekday", "#d62728", std::vector<std::optional<double>>(24)};
      SvgSeries clear_we{"clear weekend", "#17becf", std::vector<std::optional<double>>(24)};
      SvgSeries rainy_we{"rainy weekend", "#ff7f0e", std::vector<std::optional<double>>(24)};
      for (const SlotComparison& slot : comparison) {
        if (slot.index != kind) continue;
        auto& clear_series = slot.day_class == DayClass::weekday ? clear_wd : clear_we;
        auto& rainy_series = slot.day_class == DayClass::weekday ? rainy_wd : rainy_we;
        clear_series.values[static_cast<std::size_t>(slot.hour_of_day)] = slot.clear_mean;
        rainy_series.values[static_cast<std::size_t>(slot.hour_of_day)] = slot.rainy_mean;
      }
      std::vector<SvgSeries> all = {clear_wd, rainy_wd, clear_we, rainy_we};
      std::string chart =
          render_line_chart(std::string(index_name(kind)) + " by hour of day", hours, all);
      std::ofstream svg_out(fs::path(args.out_dir) / (std::string(index_name(kind)) + ".svg"),
                            std::ios::binary);
      svg_out << "<!-- manifest=" << id << " -->\n" << chart;
    }
  }

  manifest.counters["bins"] = bins.size();
  manifest.counters["shifts"] = shifts.size();
  manifest.counters["bins_no_weather"] = exclusions.bins_no_weather;
  manifest.counters["bins_zero_supply"] = exclusions.bins_zero_supply;
  manifest.counters["bins_zero_travel"] = exclusions.bins_zero_travel;
  manifest.counters["slots_masked"] = exclusions.slots_masked;
  manifest.write((fs::path(args.out_dir) / "manifest.json").string());
  std::printf("bins:          %zu (%zu shifts, manifest %s)\n", bins.size(), shifts.size(),
              id.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

struct TestArgs {
  std::string trips;
  std::string weather;
  std::string station_coords;
  std::string ref_station = "central_park";
  double rain_threshold = kDefaultRainThresholdMm;
  std::string windows_path;
  std::string regime = "both";
  std::string window = "morning";
  std::string index = "pickups_per_driver";
  std::size_t pseudo_days = 200;
  std::uint64_t seed = 1;
  std::size_t exact_cutoff = 20;
  std::string out = "tests.csv";
  std::string export_pseudo_days;
  double gap_hours = 8.0;
  std::string identity = "hack";
};

int cmd_test(const TestArgs& args) {
  const std::string station_coords = resolve_config(args.station_coords);
  const std::string windows_path = resolve_config(args.windows_path);
  RunManifest manifest;
  manifest.command = "test";
  manifest.add_input(args.trips);
  manifest.add_input(args.weather);
  if (!station_coords.empty()) manifest.add_input(station_coords);
  if (!windows_path.empty()) manifest.add_input(windows_path);
  manifest.params["regime"] = args.regime;
  manifest.params["window"] = args.window;
  manifest.params["index"] = args.index;
  manifest.params["pseudo_days"] = std::to_string(args.pseudo_days);
  manifest.params["seed"] = std::to_string(args.seed);
  manifest.params["rain_threshold"] = format_double(args.rain_threshold);
  manifest.params["exact_cutoff"] = std::to_string(args.exact_cutoff);
  const std::string id = manifest.id();

  auto kind = index_from_name(args.index);
  if (!kind) throw DataError("unknown index '" + args.index + "'");

  StationSet stations =
      station_coords.empty() ? StationSet::nyc_default() : StationSet::load(station_coords);
  int ref = stations.index_of(args.ref_station);
  if (ref < 0) throw DataError("unknown reference station '" + args.ref_station + "'");
  WindowConfig windows = windows_path.empty() ? WindowConfig{} : WindowConfig::load(windows_path);

  std::vector<TripRecord> trips = load_store(args.trips);
  std::vector<WeatherObservation> observations = parse_weather(args.weather, stations);
  WeatherTable weather = classify_hours(observations, stations, ref, args.rain_threshold);

  GapPolicy policy;
  policy.gap_threshold_s = static_cast<std::int64_t>(args.gap_hours * 3600.0);
  DriverIdentity identity =
      args.identity == "medallion" ? DriverIdentity::medallion : DriverIdentity::hack_license;
  AggregationOptions agg;
  agg.windows = windows;
  BinTable bins;
  for (const TripRecord& trip : trips) bins.add_trip(trip, agg);
  std::vector<Shift> shifts = synthesize_all_shifts(std::move(trips), identity, policy);
  add_all_driver_shifts(bins, shifts, agg);
  bins.finalize(weather, agg);

  ComparisonRunOptions options;
  options.window =
      args.window == "morning" ? WindowLabel::morning_peak : WindowLabel::evening_peak;
  options.windows = windows;
  options.n_pseudo_days = args.pseudo_days;
  options.seed = args.seed;
  options.stats.exact_cutoff = args.exact_cutoff;
  options.run_observed = args.regime != "permutation";
  options.run_permutation = args.regime != "observed";

  IndexSeries series = hourly_index_series(bins, *kind);
  if (series.points.empty()) throw DataError("index series is empty");
  std::vector<ComparisonRow> rows = run_comparison(series, weather, options);

  if (fs::path(args.out).has_parent_path())
    fs::create_directories(fs::path(args.out).parent_path());
  write_stamped(args.out, id, comparison_table_csv(rows));

  if (!args.export_pseudo_days.empty() && options.run_permutation) {
    std::vector<Timestamp> pool =
        comparison_pool(series, weather, windows, options.window, DayClassFilter::all);
    if (pool.size() >= kPseudoDayHours) {
      auto days = permutation_days(
          pool, comparison_seed(args.seed, options.window, DayClassFilter::all), args.pseudo_days);
      write_stamped(args.export_pseudo_days, id, pseudo_days_csv(days, weather));
    }
  }

  fs::path manifest_path = fs::path(args.out).parent_path() / "manifest.json";
  manifest.counters["rows"] = rows.size();
  manifest.write(manifest_path.string());
  for (const ComparisonRow& row : rows) {
    auto cell = [](const std::optional<TestResult>& r) {
      if (!r || r->insufficient) return std::string("-");
      return format_double(r->p_value);
    };
    std::printf("%-8s %-14s perm_p=%-12s obs_p=%s\n",
                std::string(day_class_filter_name(row.day_class)).c_str(),
                std::string(method_name(row.method)).c_str(), cell(row.permutation).c_str(),
                cell(row.observed).c_str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config_path;
  std::string out_dir = ".";
  bool score = false;
};

int cmd_simulate(const SimulateArgs& args) {
  const std::string config_path = resolve_config(args.config_path);
  SimConfig config = config_path.empty() ? SimConfig{} : SimConfig::load(config_path);
  if (config.start_date == 0) config.start_date = make_timestamp(2013, 6, 3);

  RunManifest manifest;
  manifest.command = "simulate";
  if (!config_path.empty()) manifest.add_input(config_path);
  manifest.params["seed"] = std::to_string(config.seed);
  manifest.params["n_drivers"] = std::to_string(config.n_drivers);
  manifest.params["days"] = std::to_string(config.days);
  manifest.params["score"] = args.score ? "1" : "0";
  const std::string id = manifest.id();

  SimResult result = simulate(config);
  if (result.trips.empty()) throw DataError("simulation produced no trips");

  fs::create_directories(args.out_dir);
  std::string trip_rows = canonical_header() + "\n";
  for (const TripRecord& trip : result.trips) append_canonical_row(trip_rows, trip);
  write_stamped((fs::path(args.out_dir) / "trips.csv").string(), id, trip_rows);

  const StationSet stations = StationSet::nyc_default();
  std::string weather_rows = "station,hour,precip_mm\n";
  for (const WeatherObservation& obs : result.weather) {
    weather_rows += stations.stations[static_cast<std::size_t>(obs.station)].id;
    weather_rows += ',';
    weather_rows += format_timestamp(obs.hour);
    weather_rows += ',';
    append_double(weather_rows, obs.precip_mm);
    weather_rows += '\n';
  }
  write_stamped((fs::path(args.out_dir) / "weather.csv").string(), id, weather_rows);

  std::string truth_rows = "driver,start,end,n_trips\n";
  for (const TrueShift& shift : result.truth.shifts) {
    truth_rows += driver_name(shift.driver);
    truth_rows += ',';
    truth_rows += format_timestamp(shift.start);
    truth_rows += ',';
    truth_rows += format_timestamp(shift.end);
    truth_rows += ',';
    append_i64(truth_rows, shift.n_trips);
    truth_rows += '\n';
  }
  write_stamped((fs::path(args.out_dir) / "truth_shifts.csv").string(), id, truth_rows);

  std::string supply_rows = "hour,supply\n";
  for (const auto& [hour, supply] : result.truth.supply_by_hour) {
    supply_rows += format_timestamp(hour);
    supply_rows += ',';
    append_i64(supply_rows, supply);
    supply_rows += '\n';
  }
  write_stamped((fs::path(args.out_dir) / "truth_supply.csv").string(), id, supply_rows);

  manifest.counters["trips"] = result.trips.size();
  manifest.counters["true_shifts"] = result.truth.shifts.size();

  if (args.score) {
    std::vector<TripRecord> trips = result.trips;
    std::vector<Shift> shifts = synthesize_all_shifts(std::move(trips));
    AggregationOptions agg;
    BinTable bins;
    for (const TripRecord& trip : result.trips) bins.add_trip(trip, agg);
    add_all_driver_shifts(bins, shifts, agg);
    WeatherTable weather = classify_hours(result.weather, stations, 0, kDefaultRainThresholdMm);
    bins.finalize(weather, agg);
    RecoveryReport report = score_recovery(result.truth, shifts, bins);
    write_stamped((fs::path(args.out_dir) / "recovery.csv").string(), id, recovery_csv(report));
    manifest.counters["recovered_shifts"] = report.inferred_shifts;
    manifest.counters["boundary_exact"] = report.boundary_exact;
    std::printf("recovery:      %llu/%llu shifts boundary-exact, supply MAE %s\n",
                static_cast<unsigned long long>(report.boundary_exact),
                static_cast<unsigned long long>(report.true_shifts),
                format_double(report.supply_mae).c_str());
  }

  manifest.write((fs::path(args.out_dir) / "manifest.json").string());
  std::printf("simulated:     %zu trips, %zu true shifts (manifest %s)\n", result.trips.size(),
              result.truth.shifts.size(), id.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"taxi supply/demand-mismatch analytics"};
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest =
      app.add_subcommand("ingest", "parse and validate trip CSVs into a canonical store");
  ingest->add_option("trips", ingest_args.trips, "input trip CSV files")->required();
  ingest->add_option("--schema", ingest_args.schema_path, "schema config (field mapping + unit)");
  ingest->add_option("--bbox", ingest_args.bbox_text, "min_lat,min_lon,max_lat,max_lon");
  ingest->add_option("--out", ingest_args.out, "canonical store path")->required();
  ingest->add_option("--reject-log", ingest_args.reject_log, "rejection sidecar (row,reason)");
  ingest->add_option("--max-duration-hours", ingest_args.max_duration_h);
  ingest->add_option("--max-distance-km", ingest_args.max_distance_km);
  ingest->add_option("--threads", ingest_args.threads, "parallel parse threads");

  ShiftsArgs shifts_args;
  auto* shifts =
      app.add_subcommand("shifts", "reconstruct driver shifts and time-of-day densities");
  shifts->add_option("--trips", shifts_args.trips, "canonical store")->required();
  shifts->add_option("--out-dir", shifts_args.out_dir);
  shifts->add_option("--gap-hours", shifts_args.gap_hours, "max in-shift gap (default 8)");
  shifts->add_option("--identity", shifts_args.identity)
      ->check(CLI::IsMember({"hack", "medallion"}));
  shifts->add_option("--overlap", shifts_args.overlap)->check(CLI::IsMember({"drop", "clip"}));
  shifts->add_option("--bin-minutes", shifts_args.bin_minutes);

  AnalyzeArgs analyze_args;
  auto* analyze =
      app.add_subcommand("analyze", "hourly bins, indices and rainy/clear comparisons");
  analyze->add_option("--trips", analyze_args.trips, "canonical store")->required();
  analyze->add_option("--weather", analyze_args.weather, "station,hour,precip_mm CSV")->required();
  analyze->add_option("--station-coords", analyze_args.station_coords, "station_id,lat,lon CSV");
  analyze->add_option("--ref-station", analyze_args.ref_station);
  analyze->add_option("--rain-threshold", analyze_args.rain_threshold, "mm per hour");
  analyze->add_option("--windows", analyze_args.windows_path, "peak window config");
  analyze->add_option("--out-dir", analyze_args.out_dir);
  analyze->add_option("--gap-hours", analyze_args.gap_hours);
  analyze->add_option("--identity", analyze_args.identity)
      ->check(CLI::IsMember({"hack", "medallion"}));
  analyze->add_option("--cell", analyze_args.cell, "grid cell row,col for hotspot analysis");
  analyze->add_option("--cell-size", analyze_args.cell_size_m, "grid cell size in meters");
  analyze->add_flag("--grid", analyze_args.with_grid, "also aggregate per grid cell");
  analyze->add_flag("--fractional-supply", analyze_args.fractional_supply);
  analyze->add_flag("--svg", analyze_args.svg, "emit line charts per index");
  analyze->add_option("--min-slot-samples", analyze_args.min_slot_samples);

  TestArgs test_args;
  auto* test =
      app.add_subcommand("test", "nonparametric rainy/clear tests per day class");
  test->add_option("--trips", test_args.trips, "canonical store")->required();
  test->add_option("--weather", test_args.weather)->required();
  test->add_option("--station-coords", test_args.station_coords);
  test->add_option("--ref-station", test_args.ref_station);
  test->add_option("--rain-threshold", test_args.rain_threshold);
  test->add_option("--windows", test_args.windows_path);
  test->add_option("--regime", test_args.regime)
      ->check(CLI::IsMember({"observed", "permutation", "both"}));
  test->add_option("--window", test_args.window)->check(CLI::IsMember({"morning", "evening"}));
  test->add_option("--index", test_args.index);
  test->add_option("--pseudo-days", test_args.pseudo_days);
  test->add_option("--seed", test_args.seed);
  test->add_option("--exact-cutoff", test_args.exact_cutoff);
  test->add_option("--out", test_args.out)->required();
  test->add_option("--export-pseudo-days", test_args.export_pseudo_days, "pseudo-day audit CSV");
  test->add_option("--gap-hours", test_args.gap_hours);
  test->add_option("--identity", test_args.identity)->check(CLI::IsMember({"hack", "medallion"}));

  SimulateArgs simulate_args;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic fleet with known ground truth");
  sim->add_option("--config", simulate_args.config_path, "simulator config file");
  sim->add_option("--out-dir", simulate_args.out_dir)->required();
  sim->add_flag("--score", simulate_args.score, "run the pipeline on the output and score recovery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(ingest_args);
    if (shifts->parsed()) return cmd_shifts(shifts_args);
    if (analyze->parsed()) return cmd_analyze(analyze_args);
    if (test->parsed()) return cmd_test(test_args);
    if (sim->parsed()) return cmd_simulate(simulate_args);
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitUsage;
}
