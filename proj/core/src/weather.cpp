#include "taxiflow/weather.hpp"

#include <algorithm>
#include <map>

#include "taxiflow/csv.hpp"

namespace taxiflow {

int StationSet::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < stations.size(); ++i)
    if (stations[i].id == id) return static_cast<int>(i);
  return -1;
}

StationSet StationSet::load(const std::string& path) {
  LineReader reader(path);
  if (!reader.is_open()) throw WeatherError("cannot open station config: " + path);
  StationSet set;
  std::string_view line;
  std::vector<std::string_view> fields;
  while (reader.next(line)) {
    line = trim(line);
    if (line.empty() || LineReader::is_comment(line)) continue;
    split_fields(line, ',', fields);
    if (fields.size() != 3) throw WeatherError("station config: expected station_id,lat,lon");
    if (trim(fields[0]) == "station_id") continue;  // header
    StationInfo info;
    info.id = std::string(trim(fields[0]));
    if (!parse_double(fields[1], info.location.lat) || !parse_double(fields[2], info.location.lon))
      throw WeatherError("station config: non-numeric coordinate for " + info.id);
    set.stations.push_back(std::move(info));
  }
  if (set.stations.empty()) throw WeatherError("station config: no stations in " + path);
  return set;
}

StationSet StationSet::nyc_default() {
  StationSet set;
  set.stations = {
      {"central_park", {40.779, -73.969}},
      {"lga", {40.779, -73.880}},
      {"jfk", {40.639, -73.764}},
  };
  return set;
}

std::vector<WeatherObservation> parse_weather(const std::string& path, const StationSet& stations,
                                              WeatherParseReport* report) {
  LineReader reader(path);
  if (!reader.is_open()) throw WeatherError("cannot open weather file: " + path);
  WeatherParseReport local;
  // (station, hour) -> index into observations; duplicates overwrite.
  std::map<std::pair<int, Timestamp>, std::size_t> seen;
  std::vector<WeatherObservation> observations;
  std::string_view line;
  std::vector<std::string_view> fields;
  bool header_skipped = false;
  while (reader.next(line)) {
    if (line.empty() || LineReader::is_comment(line)) continue;
    split_fields(line, ',', fields);
    if (fields.size() < 3) throw WeatherError("weather file: expected station,hour,precip_mm");
    if (!header_skipped) {
      header_skipped = true;
      if (trim(fields[0]) == "station") continue;
    }
    ++local.rows_read;
    std::string_view id = trim(fields[0]);
    int station = stations.index_of(id);
    if (station < 0) throw WeatherError("weather file: unknown station id '" + std::string(id) + "'");
    std::string_view hour_text = trim(fields[1]);
    std::optional<Timestamp> t;
    if (hour_text.size() == 16) {
      // "YYYY-MM-DD HH:MM" shorthand used by hourly files.
      std::string padded(hour_text);
      padded += ":00";
      t = parse_timestamp(padded);
    } else {
      t = parse_timestamp(hour_text);
    }
    if (!t) throw WeatherError("weather file: malformed hour '" + std::string(hour_text) + "'");
    std::string_view precip_text = trim(fields[2]);
    if (precip_text.empty() || precip_text == "NA" || precip_text == "M") {
      ++local.missing_values;
      continue;
    }
    double precip;
    if (!parse_double(precip_text, precip))
      throw WeatherError("weather file: non-numeric precipitation '" + std::string(precip_text) + "'");
    if (precip < 0.0) throw WeatherError("weather file: negative precipitation");
    WeatherObservation obs{station, hour_floor(*t), precip};
    auto [it, inserted] = seen.emplace(std::make_pair(station, obs.hour), observations.size());
    if (inserted) {
      observations.push_back(obs);
    } else {
      observations[it->second] = obs;
      ++local.duplicates;
    }
  }
  local.observations = observations.size();
  if (report != nullptr) *report = local;
  return observations;
}

double idw_impute(std::span<const std::pair<double, double>> value_distance) {
  double zero_sum = 0.0;
  int zero_count = 0;
  for (const auto& [value, distance] : value_distance) {
    if (distance <= 0.0) {
      zero_sum += value;
      ++zero_count;
    }
  }
  if (zero_count > 0) return zero_sum / zero_count;
  double weighted = 0.0, weight_sum = 0.0;
  for (const auto& [value, distance] : value_distance) {
    double w = 1.0 / (distance * distance);
    weighted += w * value;
    weight_sum += w;
  }
  return weighted / weight_sum;
}

std::optional<double> impute_missing(int ref_station, Timestamp hour,
                                     std::span<const WeatherObservation> same_hour,
                                     const StationSet& stations) {
  const GeoPoint ref = stations.stations[static_cast<std::size_t>(ref_station)].location;
  std::vector<std::pair<double, double>> neighbors;
  for (const WeatherObservation& obs : same_hour) {
    if (obs.station == ref_station || obs.hour != hour) continue;
    const GeoPoint at = stations.stations[static_cast<std::size_t>(obs.station)].location;
    neighbors.emplace_back(obs.precip_mm, haversine_km(ref, at));
  }
  if (neighbors.empty()) return std::nullopt;
  return idw_impute(neighbors);
}

WeatherTable classify_hours(std::span<const WeatherObservation> observations,
                            const StationSet& stations, int ref_station, double rain_threshold_mm) {
  std::map<Timestamp, std::vector<WeatherObservation>> by_hour;
  for (const WeatherObservation& obs : observations) by_hour[obs.hour].push_back(obs);

  WeatherTable table;
  for (const auto& [hour, obs] : by_hour) {
    HourWeather hw;
    hw.hour = hour;
    const WeatherObservation* ref = nullptr;
    for (const WeatherObservation& o : obs)
      if (o.station == ref_station) ref = &o;
    if (ref != nullptr) {
      hw.precip_mm = ref->precip_mm;
      hw.imputed = false;
    } else {
      std::optional<double> imputed = impute_missing(ref_station, hour, obs, stations);
      if (!imputed) continue;
      hw.precip_mm = *imputed;
      hw.imputed = true;
    }
    hw.rainy = hw.precip_mm >= rain_threshold_mm;
    table.by_hour.emplace(hour, hw);
  }
  return table;
}

std::string weather_table_csv(const WeatherTable& table) {
  std::vector<Timestamp> hours;
  hours.reserve(table.by_hour.size());
  for (const auto& [hour, _] : table.by_hour) hours.push_back(hour);
  std::sort(hours.begin(), hours.end());
  std::string out = "hour,precip_mm,rainy,imputed\n";
  for (Timestamp hour : hours) {
    const HourWeather& hw = table.by_hour.at(hour);
    out += format_timestamp(hour);
    out += ',';
    append_double(out, hw.precip_mm);
    out += ',';
    out += hw.rainy ? '1' : '0';
    out += ',';
    out += hw.imputed ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace taxiflow
