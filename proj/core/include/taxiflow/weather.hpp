#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "taxiflow/geo.hpp"
#include "taxiflow/time_util.hpp"

namespace taxiflow {

struct StationInfo {
  std::string id;
  GeoPoint location;
};

struct StationSet {
  std::vector<StationInfo> stations;

  int index_of(std::string_view id) const;
  // station_id,lat,lon CSV (header optional).
  static StationSet load(const std::string& path);
  // Central Park, LaGuardia and JFK ground stations.
  static StationSet nyc_default();
};

// One station-hour precipitation depth. Hours are truncated to the hour.
struct WeatherObservation {
  int station = 0;
  Timestamp hour = 0;
  double precip_mm = 0.0;
};

struct WeatherParseReport {
  std::uint64_t rows_read = 0;
  std::uint64_t observations = 0;
  std::uint64_t duplicates = 0;      // same (station, hour): last wins
  std::uint64_t missing_values = 0;  // empty/NA precipitation fields
};

class WeatherError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// station,hour,precip_mm CSV. Throws WeatherError on negative precipitation
// or an unknown station id.
std::vector<WeatherObservation> parse_weather(const std::string& path, const StationSet& stations,
                                              WeatherParseReport* report = nullptr);

// Inverse-distance-weighted (power 2) mean. Pairs are (value, distance_km).
// Zero-distance neighbors dominate: their plain mean is returned.
double idw_impute(std::span<const std::pair<double, double>> value_distance);

// Imputes the reference station's value for one hour from the other stations'
// simultaneous observations. Returns nullopt when no other station reported.
std::optional<double> impute_missing(int ref_station, Timestamp hour,
                                     std::span<const WeatherObservation> same_hour,
                                     const StationSet& stations);

struct HourWeather {
  Timestamp hour = 0;
  double precip_mm = 0.0;
  bool rainy = false;
  bool imputed = false;
};

// Classified hours keyed by hour timestamp. Hours absent from the map are
// unclassifiable (no station reported anything) and are excluded from
// comparisons.
struct WeatherTable {
  std::unordered_map<Timestamp, HourWeather> by_hour;

  const HourWeather* find(Timestamp hour) const {
    auto it = by_hour.find(hour);
    return it == by_hour.end() ? nullptr : &it->second;
  }
  // -1 unknown, 0 clear, 1 rainy.
  int rain_state(Timestamp hour) const {
    const HourWeather* w = find(hour);
    return w == nullptr ? -1 : (w->rainy ? 1 : 0);
  }
};

inline constexpr double kDefaultRainThresholdMm = 0.3;

WeatherTable classify_hours(std::span<const WeatherObservation> observations,
                            const StationSet& stations, int ref_station,
                            double rain_threshold_mm = kDefaultRainThresholdMm);

// hour,precip_mm,rainy,imputed rows sorted by hour.
std::string weather_table_csv(const WeatherTable& table);

}  // namespace taxiflow
