#include "taxiflow/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <unordered_map>

#include "taxiflow/csv.hpp"
#include "taxiflow/rng.hpp"

namespace taxiflow {

namespace {

constexpr std::int64_t kShiftRuleGapS = 8 * 3600;
constexpr std::int64_t kInterShiftMarginS = 60;
constexpr double kPi = 3.14159265358979323846;
constexpr double kCrowFlightFactor = 0.8;  // straight-line share of metered distance

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

GeoPoint clamp_into(const BoundingBox& bbox, GeoPoint p) {
  p.lat = clamp(p.lat, bbox.min_lat, bbox.max_lat);
  p.lon = clamp(p.lon, bbox.min_lon, bbox.max_lon);
  return p;
}

GeoPoint offset_meters(const BoundingBox& bbox, GeoPoint origin, double north_m, double east_m) {
  GeoPoint p = origin;
  p.lat += north_m / kMetersPerDegreeLat;
  p.lon += east_m / (kMetersPerDegreeLat * std::cos(origin.lat * kPi / 180.0));
  return clamp_into(bbox, p);
}

}  // namespace

double SimConfig::rate_for(bool rainy, bool weekend) const {
  if (!rainy) return base_rate_per_hour;
  double multiplier = rain_multiplier;
  if (weekend && rain_multiplier_weekend >= 0.0) multiplier = rain_multiplier_weekend;
  return base_rate_per_hour * multiplier;
}

double SimConfig::expected_idle_seconds(bool rainy_weekday) const {
  double rate = rate_for(rainy_weekday, false);
  return std::max(0.0, 3600.0 / rate - trip_duration_mean_min * 60.0);
}

void SimConfig::validate() const {
  if (n_drivers == 0) throw SimError("config: n_drivers must be positive");
  if (days == 0) throw SimError("config: days must be positive");
  if (shift_start_mixture.empty()) throw SimError("config: shift_start_mixture is empty");
  double weight_sum = 0.0;
  for (const GaussianComponent& c : shift_start_mixture) {
    if (c.weight <= 0.0) throw SimError("config: mixture weight must be positive");
    if (c.stddev_hours < 0.0) throw SimError("config: mixture stddev must be non-negative");
    weight_sum += c.weight;
  }
  if (weight_sum <= 0.0) throw SimError("config: mixture weights sum to zero");
  if (base_rate_per_hour <= 0.0) throw SimError("config: base_rate_per_hour must be positive");
  if (rain_multiplier < 0.0) throw SimError("config: rain_multiplier must be non-negative");
  if (rain_probability < 0.0 || rain_probability > 1.0)
    throw SimError("config: rain_probability must be in [0,1]");
  if (missing_weather_rate < 0.0 || missing_weather_rate > 1.0)
    throw SimError("config: missing_weather_rate must be in [0,1]");
  if (shift_length_mean_h <= 0.0) throw SimError("config: shift_length_mean_h must be positive");
  if (trip_duration_mean_min < 1.0) throw SimError("config: trip duration must be at least a minute");
  if (shift_length_mean_h * 60.0 < trip_duration_mean_min)
    throw SimError("config: shift shorter than one trip");
  if (idle_gap_cap_hours <= 0.0 || idle_gap_cap_hours * 3600.0 >= kShiftRuleGapS)
    throw SimError("config: idle_gap_cap_hours must be in (0, 8)");
  if (!bbox.valid()) throw SimError("config: bounding box is degenerate");
  if (hotspots.empty()) throw SimError("config: need at least one hotspot");
  for (const Hotspot& h : hotspots) {
    if (h.weight <= 0.0) throw SimError("config: hotspot weight must be positive");
    if (!bbox.contains(h.center)) throw SimError("config: hotspot outside bounding box");
  }
  if (fare_base < 0.0 || fare_per_km < 0.0) throw SimError("config: fares must be non-negative");
}

SimConfig SimConfig::load(const std::string& path) {
  LineReader reader(path);
  if (!reader.is_open()) throw SimError("cannot open simulator config: " + path);
  SimConfig config;
  config.start_date = make_timestamp(2013, 6, 3);
  std::string_view line;
  std::vector<std::string_view> parts, nums;
  while (reader.next(line)) {
    line = trim(line);
    if (line.empty() || LineReader::is_comment(line)) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw SimError("simulator config: expected key=value, got '" + std::string(line) + "'");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    auto number = [&](double& out) {
      if (!parse_double(value, out)) throw SimError("simulator config: bad number for " + key);
    };
    auto pair_of = [&](double& a, double& b) {
      split_fields(value, ':', parts);
      if (parts.size() != 2 || !parse_double(parts[0], a) || !parse_double(parts[1], b))
        throw SimError("simulator config: expected mean:stddev for " + key);
    };
    if (key == "seed") {
      std::uint64_t s;
      if (!parse_u64(value, s)) throw SimError("simulator config: bad seed");
      config.seed = s;
    } else if (key == "n_drivers") {
      double v;
      number(v);
      config.n_drivers = static_cast<std::uint32_t>(v);
    } else if (key == "days") {
      double v;
      number(v);
      config.days = static_cast<std::uint32_t>(v);
    } else if (key == "start_date") {
      std::string full(value);
      full += " 00:00:00";
      auto t = parse_timestamp(full);
      if (!t) throw SimError("simulator config: start_date must be YYYY-MM-DD");
      config.start_date = *t;
    } else if (key == "shift_start_mixture") {
      config.shift_start_mixture.clear();
      split_fields(value, ';', parts);
      for (std::string_view part : parts) {
        split_fields(trim(part), ':', nums);
        GaussianComponent c;
        if (nums.size() != 3 || !parse_double(nums[0], c.mean_hour) ||
            !parse_double(nums[1], c.stddev_hours) || !parse_double(nums[2], c.weight))
          throw SimError("simulator config: mixture components are mean:stddev:weight");
        config.shift_start_mixture.push_back(c);
      }
    } else if (key == "shift_length_hours") {
      pair_of(config.shift_length_mean_h, config.shift_length_stddev_h);
    } else if (key == "base_rate_per_hour") {
      number(config.base_rate_per_hour);
    } else if (key == "rain_multiplier") {
      number(config.rain_multiplier);
    } else if (key == "rain_multiplier_weekend") {
      number(config.rain_multiplier_weekend);
    } else if (key == "rain_probability") {
      number(config.rain_probability);
    } else if (key == "rain_depth_mm") {
      pair_of(config.rain_depth_min_mm, config.rain_depth_mean_mm);
    } else if (key == "missing_weather_rate") {
      number(config.missing_weather_rate);
    } else if (key == "trip_duration_minutes") {
      pair_of(config.trip_duration_mean_min, config.trip_duration_stddev_min);
    } else if (key == "trip_speed_kmh") {
      pair_of(config.trip_speed_mean_kmh, config.trip_speed_stddev_kmh);
    } else if (key == "fare_base") {
      number(config.fare_base);
    } else if (key == "fare_per_km") {
      number(config.fare_per_km);
    } else if (key == "idle_gap_cap_hours") {
      number(config.idle_gap_cap_hours);
    } else if (key == "pre_cruise_minutes") {
      pair_of(config.pre_cruise_mean_min, config.pre_cruise_stddev_min);
    } else if (key == "bbox") {
      split_fields(value, ',', parts);
      if (parts.size() != 4 || !parse_double(parts[0], config.bbox.min_lat) ||
          !parse_double(parts[1], config.bbox.min_lon) ||
          !parse_double(parts[2], config.bbox.max_lat) ||
          !parse_double(parts[3], config.bbox.max_lon))
        throw SimError("simulator config: bbox is min_lat,min_lon,max_lat,max_lon");
    } else if (key == "hotspots") {
      config.hotspots.clear();
      split_fields(value, ';', parts);
      for (std::string_view part : parts) {
        split_fields(trim(part), ',', nums);
        Hotspot h;
        if (nums.size() != 4 || !parse_double(nums[0], h.center.lat) ||
            !parse_double(nums[1], h.center.lon) || !parse_double(nums[2], h.sigma_m) ||
            !parse_double(nums[3], h.weight))
          throw SimError("simulator config: hotspots are lat,lon,sigma_m,weight;...");
        config.hotspots.push_back(h);
      }
    } else {
      throw SimError("simulator config: unknown key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

std::string driver_name(std::uint32_t driver) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "D%05u", driver);
  return buf;
}

namespace {

std::string medallion_name(std::uint32_t driver) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "M%04u", driver / 2);
  return buf;
}

struct SessionDraw {
  std::vector<Timestamp> pickups;
  double expected = 0.0;
};

// Poisson pickups per hour slice of [start, start+length), at the hour's
// demand rate. Pickups closer than 2 s are thinned so trips never collide.
SessionDraw draw_session(Rng& rng, const SimConfig& config, const GroundTruth& truth,
                         Timestamp session_start, std::int64_t length_s) {
  SessionDraw draw;
  const Timestamp session_end = session_start + length_s;
  for (Timestamp h = hour_floor(session_start); h < session_end; h += kSecondsPerHour) {
    const Timestamp a = std::max(session_start, h);
    const Timestamp b = std::min(session_end, h + kSecondsPerHour);
    if (b <= a) continue;
    auto rain_it = truth.rain_by_hour.find(h);
    const bool rainy = rain_it != truth.rain_by_hour.end() && rain_it->second;
    const double rate = config.rate_for(rainy, is_weekend(h));
    const double mean = rate * static_cast<double>(b - a) / 3600.0;
    draw.expected += mean;
    const std::uint32_t count = rng.poisson(mean);
    for (std::uint32_t i = 0; i < count; ++i)
      draw.pickups.push_back(
          a + static_cast<Timestamp>(rng.uniform() * static_cast<double>(b - a)));
  }
  std::sort(draw.pickups.begin(), draw.pickups.end());
  std::vector<Timestamp> thinned;
  thinned.reserve(draw.pickups.size());
  for (Timestamp t : draw.pickups) {
    if (!thinned.empty() && t - thinned.back() < 2) continue;
    thinned.push_back(t);
  }
  draw.pickups = std::move(thinned);
  return draw;
}

bool gap_consistent(std::span<const Timestamp> pickups, std::int64_t cap_s) {
  for (std::size_t i = 1; i < pickups.size(); ++i)
    if (pickups[i] - pickups[i - 1] > cap_s) return false;
  return true;
}

}  // namespace

SimResult simulate(const SimConfig& config) {
  config.validate();
  SimResult result;
  const Timestamp start = config.start_date != 0 ? config.start_date : make_timestamp(2013, 6, 3);
  // One spare day of weather so sessions spilling past midnight stay classified.
  const Timestamp horizon = start + static_cast<std::int64_t>(config.days + 1) * kSecondsPerDay;

  // Weather stream.
  {
    Rng rng(derive_seed(config.seed, 0));
    const StationSet stations = StationSet::nyc_default();
    for (Timestamp h = start; h < horizon; h += kSecondsPerHour) {
      const bool rainy = rng.bernoulli(config.rain_probability);
      const double depth =
          rainy ? config.rain_depth_min_mm + rng.exponential(config.rain_depth_mean_mm) : 0.0;
      result.truth.rain_by_hour[h] = rainy;
      const bool drop_ref = config.missing_weather_rate > 0.0 && rng.bernoulli(config.missing_weather_rate);
      for (std::size_t s = 0; s < stations.stations.size(); ++s) {
        if (s == 0 && drop_ref) continue;
        result.weather.push_back(WeatherObservation{static_cast<int>(s), h, depth});
      }
    }
  }

  double mixture_total = 0.0;
  for (const GaussianComponent& c : config.shift_start_mixture) mixture_total += c.weight;

  const std::int64_t cap_s = static_cast<std::int64_t>(config.idle_gap_cap_hours * 3600.0);
  const bool pre_cruise = config.pre_cruise_mean_min > 0.0;

  for (std::uint32_t d = 0; d < config.n_drivers; ++d) {
    Rng rng(derive_seed(config.seed, 1000 + d));
    // Habitual component per driver; daily starts jitter around it.
    std::size_t component = 0;
    {
      double pick = rng.uniform() * mixture_total;
      double cumulative = 0.0;
      for (std::size_t c = 0; c < config.shift_start_mixture.size(); ++c) {
        cumulative += config.shift_start_mixture[c].weight;
        if (pick < cumulative) {
          component = c;
          break;
        }
      }
    }
    const GaussianComponent& home = config.shift_start_mixture[component];
    const std::string hack = driver_name(d);
    const std::string medallion = medallion_name(d);

    Timestamp prev_end = std::numeric_limits<Timestamp>::min() / 2;
    for (std::uint32_t day = 0; day < config.days; ++day) {
      const Timestamp day_start = start + static_cast<std::int64_t>(day) * kSecondsPerDay;
      SessionDraw session;
      Timestamp session_start = 0;
      bool feasible = false;
      for (int attempt = 0; attempt < 16; ++attempt) {
        session = SessionDraw{};
        double start_hour = rng.normal(home.mean_hour, home.stddev_hours);
        start_hour = clamp(start_hour, 0.0, 23.999);
        session_start = day_start + static_cast<Timestamp>(std::llround(start_hour * 3600.0));
        if (session_start - prev_end <= kShiftRuleGapS + kInterShiftMarginS) continue;
        double length_h = rng.normal(config.shift_length_mean_h, config.shift_length_stddev_h);
        length_h = std::max(1.0, length_h);
        auto length_s = static_cast<std::int64_t>(std::llround(length_h * 3600.0));
        session = draw_session(rng, config, result.truth, session_start, length_s);
        if (gap_consistent(session.pickups, cap_s)) {
          feasible = true;
          break;
        }
      }
      if (!feasible || session.pickups.empty()) {
        // Low-demand hole the cap could not absorb: keep the longest
        // consistent prefix rather than emit a rule-breaking session.
        if (!session.pickups.empty()) {
          std::size_t keep = 1;
          while (keep < session.pickups.size() &&
                 session.pickups[keep] - session.pickups[keep - 1] <= cap_s)
            ++keep;
          session.pickups.resize(keep);
        } else {
          result.truth.expected_pickups += session.expected;
          continue;
        }
      }
      result.truth.expected_pickups += session.expected;

      // Trips along the pickup sequence.
      double hotspot_total = 0.0;
      for (const SimConfig::Hotspot& h : config.hotspots) hotspot_total += h.weight;
      TrueShift truth_shift;
      truth_shift.driver = d;
      truth_shift.n_trips = static_cast<std::uint32_t>(session.pickups.size());
      Timestamp last_dropoff = 0;
      for (std::size_t i = 0; i < session.pickups.size(); ++i) {
        const Timestamp pickup = session.pickups[i];
        auto duration = static_cast<std::int64_t>(
            std::llround(clamp(rng.normal(config.trip_duration_mean_min, config.trip_duration_stddev_min),
                               1.0, 120.0) *
                        60.0));
        Timestamp dropoff = pickup + duration;
        if (i + 1 < session.pickups.size())
          dropoff = std::min(dropoff, session.pickups[i + 1] - 1);
        const double realized_h = static_cast<double>(dropoff - pickup) / 3600.0;
        const double speed = clamp(rng.normal(config.trip_speed_mean_kmh, config.trip_speed_stddev_kmh), 3.0, 100.0);
        const double distance_km = speed * realized_h;

        // Pickup point from the hotspot mixture, dropoff along a random bearing.
        double pick = rng.uniform() * hotspot_total;
        const SimConfig::Hotspot* spot = &config.hotspots.back();
        double cumulative = 0.0;
        for (const SimConfig::Hotspot& h : config.hotspots) {
          cumulative += h.weight;
          if (pick < cumulative) {
            spot = &h;
            break;
          }
        }
        GeoPoint origin = offset_meters(config.bbox, spot->center, rng.normal(0.0, spot->sigma_m),
                                        rng.normal(0.0, spot->sigma_m));
        const double bearing = rng.uniform() * 2.0 * kPi;
        const double crow_m = distance_km * 1000.0 * kCrowFlightFactor;
        GeoPoint destination =
            offset_meters(config.bbox, origin, crow_m * std::cos(bearing), crow_m * std::sin(bearing));

        TripRecord trip;
        trip.medallion = medallion;
        trip.hack_license = hack;
        trip.pickup_time = pickup;
        trip.dropoff_time = dropoff;
        trip.pickup = origin;
        trip.dropoff = destination;
        trip.trip_distance_km = std::round(distance_km * 1000.0) / 1000.0;
        trip.fare_total =
            std::round((config.fare_base + config.fare_per_km * trip.trip_distance_km) * 100.0) / 100.0;
        result.trips.push_back(std::move(trip));
        last_dropoff = dropoff;
      }

      truth_shift.start = session.pickups.front();
      if (pre_cruise) {
        double cruise_min =
            std::max(0.0, rng.normal(config.pre_cruise_mean_min, config.pre_cruise_stddev_min));
        truth_shift.start -= static_cast<Timestamp>(std::llround(cruise_min * 60.0));
      }
      truth_shift.end = last_dropoff;
      result.truth.shifts.push_back(truth_shift);
      prev_end = last_dropoff;
    }
  }

  std::sort(result.truth.shifts.begin(), result.truth.shifts.end(),
            [](const TrueShift& a, const TrueShift& b) {
              if (a.driver != b.driver) return a.driver < b.driver;
              return a.start < b.start;
            });
  for (const TrueShift& shift : result.truth.shifts)
    for (Timestamp h = hour_floor(shift.start); h <= shift.end; h += kSecondsPerHour)
      result.truth.supply_by_hour[h] += 1;
  for (const auto& [h, rainy] : result.truth.rain_by_hour)
    result.truth.demand_rate_by_hour[h] = config.rate_for(rainy, is_weekend(h));

  std::sort(result.trips.begin(), result.trips.end(), [](const TripRecord& a, const TripRecord& b) {
    if (a.pickup_time != b.pickup_time) return a.pickup_time < b.pickup_time;
    if (a.hack_license != b.hack_license) return a.hack_license < b.hack_license;
    return a.dropoff_time < b.dropoff_time;
  });
  return result;
}

RecoveryReport score_recovery(const GroundTruth& truth, std::span<const Shift> inferred,
                              const BinTable& bins) {
  RecoveryReport report;
  report.true_shifts = truth.shifts.size();
  report.inferred_shifts = inferred.size();

  std::unordered_map<std::string, std::vector<const TrueShift*>> truth_by_driver;
  for (const TrueShift& shift : truth.shifts)
    truth_by_driver[driver_name(shift.driver)].push_back(&shift);
  std::unordered_map<std::string, std::vector<const Shift*>> inferred_by_driver;
  for (const Shift& shift : inferred) inferred_by_driver[shift.driver].push_back(&shift);

  if (truth_by_driver.size() != inferred_by_driver.size())
    throw SimError("recovery: driver id sets differ");
  for (const auto& [driver, _] : truth_by_driver)
    if (inferred_by_driver.find(driver) == inferred_by_driver.end())
      throw SimError("recovery: driver id sets differ");

  report.drivers_total = truth_by_driver.size();
  double start_delta_sum = 0.0, end_delta_sum = 0.0;
  for (auto& [driver, truth_shifts] : truth_by_driver) {
    auto& inferred_shifts = inferred_by_driver[driver];
    // Both lists are (driver, start)-sorted by construction.
    if (truth_shifts.size() != inferred_shifts.size()) continue;
    ++report.drivers_with_exact_count;
    for (std::size_t i = 0; i < truth_shifts.size(); ++i) {
      ++report.matched_shifts;
      const std::int64_t ds = inferred_shifts[i]->start - truth_shifts[i]->start;
      const std::int64_t de = inferred_shifts[i]->end - truth_shifts[i]->end;
      start_delta_sum += std::fabs(static_cast<double>(ds));
      end_delta_sum += std::fabs(static_cast<double>(de));
      if (ds == 0 && de == 0) ++report.boundary_exact;
    }
  }
  if (report.matched_shifts > 0) {
    report.mean_abs_start_delta_s = start_delta_sum / static_cast<double>(report.matched_shifts);
    report.mean_abs_end_delta_s = end_delta_sum / static_cast<double>(report.matched_shifts);
  }

  // Supply error over the union of truth and inferred hours.
  std::set<Timestamp> hours;
  for (const auto& [h, _] : truth.supply_by_hour) hours.insert(h);
  for (const HourlyBin* bin : bins.citywide_sorted())
    if (bin->supply_driver_s > 0) hours.insert(bin->hour);
  double abs_error = 0.0;
  std::uint64_t total_pickups = 0;
  for (const HourlyBin* bin : bins.citywide_sorted()) total_pickups += bin->pickups;
  for (Timestamp h : hours) {
    auto it = truth.supply_by_hour.find(h);
    const double expected = it == truth.supply_by_hour.end() ? 0.0 : it->second;
    const HourlyBin* bin = bins.find(h, -1);
    const double got = bin == nullptr ? 0.0 : bin->supply();
    abs_error += std::fabs(got - expected);
  }
  report.supply_mae = hours.empty() ? 0.0 : abs_error / static_cast<double>(hours.size());
  report.demand_ratio_error =
      truth.expected_pickups > 0.0
          ? std::fabs(static_cast<double>(total_pickups) / truth.expected_pickups - 1.0)
          : 0.0;
  return report;
}

std::string recovery_csv(const RecoveryReport& report) {
  std::string out = "metric,value\n";
  auto row = [&](std::string_view name, double value) {
    out += name;
    out += ',';
    append_double(out, value);
    out += '\n';
  };
  row("true_shifts", static_cast<double>(report.true_shifts));
  row("inferred_shifts", static_cast<double>(report.inferred_shifts));
  row("drivers_total", static_cast<double>(report.drivers_total));
  row("drivers_with_exact_count", static_cast<double>(report.drivers_with_exact_count));
  row("matched_shifts", static_cast<double>(report.matched_shifts));
  row("boundary_exact", static_cast<double>(report.boundary_exact));
  row("mean_abs_start_delta_s", report.mean_abs_start_delta_s);
  row("mean_abs_end_delta_s", report.mean_abs_end_delta_s);
  row("supply_mae", report.supply_mae);
  row("demand_ratio_error", report.demand_ratio_error);
  return out;
}

}  // namespace taxiflow
