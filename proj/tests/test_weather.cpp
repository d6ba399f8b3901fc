#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "taxiflow/weather.hpp"

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

// Synthetic geometry: reference on the equator, neighbors due east at one and
// two degrees, so great-circle distances are exactly d and 2d.
StationSet line_stations() {
  StationSet set;
  set.stations = {
      {"ref", {0.0, 0.0}},
      {"near", {0.0, 1.0}},
      {"far", {0.0, 2.0}},
  };
  return set;
}

}  // namespace

TEST_CASE("parse_weather basics") {
  StationSet stations = StationSet::nyc_default();
  SUBCASE("well-formed rows") {
    TempFile file("weather_ok.csv",
                  "station,hour,precip_mm\n"
                  "central_park,2013-06-07 14:00,2.5\n"
                  "lga,2013-06-07 14:23:45,1.0\n");
    WeatherParseReport report;
    auto obs = parse_weather(file.path, stations, &report);
    REQUIRE(obs.size() == 2);
    CHECK(obs[0].precip_mm == 2.5);
    CHECK(obs[0].hour == make_timestamp(2013, 6, 7, 14));
    CHECK(obs[1].hour == make_timestamp(2013, 6, 7, 14));  // truncated
    CHECK(report.rows_read == 2);
  }
  SUBCASE("negative precipitation is an error") {
    TempFile file("weather_neg.csv", "central_park,2013-06-07 14:00,-1\n");
    CHECK_THROWS_AS(parse_weather(file.path, stations), WeatherError);
  }
  SUBCASE("unknown station is an error") {
    TempFile file("weather_unknown.csv", "newark,2013-06-07 14:00,1\n");
    CHECK_THROWS_AS(parse_weather(file.path, stations), WeatherError);
  }
  SUBCASE("duplicate station-hour keeps the last value") {
    TempFile file("weather_dup.csv",
                  "central_park,2013-06-07 14:00,1.0\n"
                  "central_park,2013-06-07 14:30,2.0\n");
    WeatherParseReport report;
    auto obs = parse_weather(file.path, stations, &report);
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].precip_mm == 2.0);
    CHECK(report.duplicates == 1);
  }
  SUBCASE("missing values are skipped and counted") {
    TempFile file("weather_missing.csv",
                  "central_park,2013-06-07 14:00,\n"
                  "lga,2013-06-07 14:00,NA\n"
                  "jfk,2013-06-07 14:00,0.4\n");
    WeatherParseReport report;
    auto obs = parse_weather(file.path, stations, &report);
    CHECK(obs.size() == 1);
    CHECK(report.missing_values == 2);
  }
}

TEST_CASE("idw imputation") {
  SUBCASE("both neighbors zero") {
    std::vector<std::pair<double, double>> vd = {{0.0, 5.0}, {0.0, 9.0}};
    CHECK(idw_impute(vd) == 0.0);
  }
  SUBCASE("equidistant neighbors reduce to the plain mean") {
    std::vector<std::pair<double, double>> vd = {{2.0, 7.0}, {4.0, 7.0}};
    CHECK(idw_impute(vd) == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("distance asymmetry weights the closer station") {
    std::vector<std::pair<double, double>> vd = {{3.0, 1.0}, {0.0, 2.0}};
    CHECK(idw_impute(vd) == doctest::Approx(2.4).epsilon(1e-12));
  }
  SUBCASE("exact interpolation of equal values") {
    std::vector<std::pair<double, double>> vd = {{1.7, 3.0}, {1.7, 11.0}, {1.7, 0.7}};
    CHECK(idw_impute(vd) == doctest::Approx(1.7).epsilon(1e-15));
  }
  SUBCASE("zero-distance neighbor dominates") {
    std::vector<std::pair<double, double>> vd = {{5.0, 0.0}, {100.0, 2.0}};
    CHECK(idw_impute(vd) == 5.0);
  }
}

TEST_CASE("impute_missing uses station geometry") {
  StationSet stations = line_stations();
  Timestamp hour = make_timestamp(2013, 6, 7, 14);
  std::vector<WeatherObservation> same_hour = {
      {1, hour, 3.0},  // near, distance d
      {2, hour, 0.0},  // far, distance 2d
  };
  auto value = impute_missing(0, hour, same_hour, stations);
  REQUIRE(value.has_value());
  CHECK(*value == doctest::Approx(2.4).epsilon(1e-9));

  std::vector<WeatherObservation> nothing;
  CHECK_FALSE(impute_missing(0, hour, nothing, stations).has_value());
}

TEST_CASE("classify_hours") {
  StationSet stations = line_stations();
  Timestamp h0 = make_timestamp(2013, 6, 7, 0);
  std::vector<WeatherObservation> obs = {
      {0, h0, 0.0},                         // dry hour from reference
      {0, h0 + 3600, 5.0},                  // wet hour from reference
      {1, h0 + 7200, 1.0}, {2, h0 + 7200, 1.0},  // reference missing: imputed 1.0
  };
  WeatherTable table = classify_hours(obs, stations, 0, 0.3);
  REQUIRE(table.by_hour.size() == 3);
  CHECK_FALSE(table.find(h0)->rainy);
  CHECK(table.find(h0 + 3600)->rainy);
  const HourWeather* imputed = table.find(h0 + 7200);
  REQUIRE(imputed != nullptr);
  CHECK(imputed->rainy);
  CHECK(imputed->imputed);
  CHECK(imputed->precip_mm == doctest::Approx(1.0));
  CHECK(table.rain_state(h0 + 9999999) == -1);  // unclassifiable

  SUBCASE("threshold boundary is inclusive") {
    std::vector<WeatherObservation> edge = {{0, h0, 0.3}};
    WeatherTable t = classify_hours(edge, stations, 0, 0.3);
    CHECK(t.find(h0)->rainy);
  }
  SUBCASE("raising the threshold never makes a clear hour rainy") {
    for (double low = 0.1; low < 3.0; low += 0.3) {
      WeatherTable coarse = classify_hours(obs, stations, 0, low);
      WeatherTable fine = classify_hours(obs, stations, 0, low + 0.5);
      for (const auto& [hour, hw] : fine.by_hour)
        if (hw.rainy) CHECK(coarse.find(hour)->rainy);
    }
  }
}

TEST_CASE("station config load") {
  TempFile file("stations_test.csv",
                "station_id,lat,lon\n"
                "central_park,40.779,-73.969\n"
                "lga,40.779,-73.880\n");
  StationSet set = StationSet::load(file.path);
  REQUIRE(set.stations.size() == 2);
  CHECK(set.index_of("lga") == 1);
  CHECK(set.index_of("jfk") == -1);
}
