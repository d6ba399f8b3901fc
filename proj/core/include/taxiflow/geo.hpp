#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

namespace taxiflow {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kMetersPerDegreeLat = 111320.0;

// Great-circle distance between two WGS84 points.
inline double haversine_km(GeoPoint a, GeoPoint b) {
  constexpr double deg = 3.14159265358979323846 / 180.0;
  double dlat = (b.lat - a.lat) * deg;
  double dlon = (b.lon - a.lon) * deg;
  double sa = std::sin(dlat / 2.0);
  double sb = std::sin(dlon / 2.0);
  double h = sa * sa + std::cos(a.lat * deg) * std::cos(b.lat * deg) * sb * sb;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

struct BoundingBox {
  double min_lat = 0.0, min_lon = 0.0, max_lat = 0.0, max_lon = 0.0;

  bool valid() const { return max_lat > min_lat && max_lon > min_lon; }
  bool contains(GeoPoint p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }

  // Manhattan-centric default covering the five boroughs plus the airports.
  static BoundingBox nyc() { return {40.45, -74.30, 41.00, -73.60}; }
};

struct GridCell {
  std::int32_t row = 0;
  std::int32_t col = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

// Fixed lat/lon grid over a bounding box with approximately square cells of
// cell_size_m meters. Row 0 is the southern edge, col 0 the western edge.
struct Grid {
  BoundingBox bbox;
  double cell_size_m = 250.0;

  double lat_step() const { return cell_size_m / kMetersPerDegreeLat; }
  double lon_step() const {
    double mid = 0.5 * (bbox.min_lat + bbox.max_lat);
    constexpr double deg = 3.14159265358979323846 / 180.0;
    return cell_size_m / (kMetersPerDegreeLat * std::cos(mid * deg));
  }
  std::int32_t rows() const {
    return static_cast<std::int32_t>(std::ceil((bbox.max_lat - bbox.min_lat) / lat_step()));
  }
  std::int32_t cols() const {
    return static_cast<std::int32_t>(std::ceil((bbox.max_lon - bbox.min_lon) / lon_step()));
  }

  std::optional<GridCell> cell_of(GeoPoint p) const {
    if (!bbox.contains(p)) return std::nullopt;
    auto r = static_cast<std::int32_t>((p.lat - bbox.min_lat) / lat_step());
    auto c = static_cast<std::int32_t>((p.lon - bbox.min_lon) / lon_step());
    if (r >= rows()) r = rows() - 1;
    if (c >= cols()) c = cols() - 1;
    return GridCell{r, c};
  }

  std::int32_t flat_index(GridCell cell) const { return cell.row * cols() + cell.col; }
};

}  // namespace taxiflow
