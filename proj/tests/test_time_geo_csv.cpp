#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "taxiflow/csv.hpp"
#include "taxiflow/geo.hpp"
#include "taxiflow/rng.hpp"
#include "taxiflow/time_util.hpp"

using namespace taxiflow;

TEST_CASE("timestamp parse and format round-trip") {
  auto t = parse_timestamp("2013-03-08 07:15:00");
  REQUIRE(t.has_value());
  CHECK(format_timestamp(*t) == "2013-03-08 07:15:00");
  CHECK(*t == make_timestamp(2013, 3, 8, 7, 15, 0));
  CHECK(hour_of_day(*t) == 7);
  CHECK(minute_of_day(*t) == 7 * 60 + 15);
  CHECK(weekday_index(*t) == 4);  // Friday
  CHECK_FALSE(is_weekend(*t));
}

TEST_CASE("timestamp rejects malformed input") {
  CHECK_FALSE(parse_timestamp("2013-03-08T07:15:00").has_value());
  CHECK_FALSE(parse_timestamp("2013-03-08 07:15").has_value());
  CHECK_FALSE(parse_timestamp("2013-13-08 07:15:00").has_value());
  CHECK_FALSE(parse_timestamp("2013-02-30 07:15:00").has_value());
  CHECK_FALSE(parse_timestamp("2013-03-08 24:15:00").has_value());
  CHECK_FALSE(parse_timestamp("2013-03-0a 07:15:00").has_value());
  CHECK(parse_timestamp("2016-02-29 00:00:00").has_value());  // leap day
}

TEST_CASE("weekday and weekend classification") {
  CHECK(weekday_index(make_timestamp(2013, 6, 3)) == 0);   // Monday
  CHECK(weekday_index(make_timestamp(2013, 6, 8)) == 5);   // Saturday
  CHECK(is_weekend(make_timestamp(2013, 6, 8, 17)));
  CHECK(is_weekend(make_timestamp(2013, 6, 9, 3)));
  CHECK_FALSE(is_weekend(make_timestamp(2013, 6, 7, 23)));
}

TEST_CASE("hour and day floors") {
  Timestamp t = make_timestamp(2013, 6, 7, 14, 59, 59);
  CHECK(hour_floor(t) == make_timestamp(2013, 6, 7, 14));
  CHECK(day_floor(t) == make_timestamp(2013, 6, 7));
  CHECK(hour_floor(make_timestamp(2013, 6, 7, 14)) == make_timestamp(2013, 6, 7, 14));
}

TEST_CASE("haversine known distances") {
  // Central Park to JFK is roughly 21-22 km.
  double d = haversine_km({40.779, -73.969}, {40.639, -73.764});
  CHECK(d > 20.0);
  CHECK(d < 25.0);
  CHECK(haversine_km({40.75, -73.98}, {40.75, -73.98}) == doctest::Approx(0.0));
  // One degree of longitude along the equator.
  double one_deg = haversine_km({0.0, 0.0}, {0.0, 1.0});
  CHECK(one_deg == doctest::Approx(111.195).epsilon(0.001));
  // Distances on the equator scale linearly with longitude.
  double two_deg = haversine_km({0.0, 0.0}, {0.0, 2.0});
  CHECK(two_deg == doctest::Approx(2.0 * one_deg).epsilon(1e-12));
}

TEST_CASE("bounding box and grid") {
  BoundingBox bbox = BoundingBox::nyc();
  CHECK(bbox.contains({40.75, -73.98}));
  CHECK_FALSE(bbox.contains({0.0, 0.0}));

  Grid grid{bbox, 250.0};
  CHECK(grid.rows() > 0);
  CHECK(grid.cols() > 0);
  auto cell = grid.cell_of({40.75, -73.98});
  REQUIRE(cell.has_value());
  CHECK(cell->row >= 0);
  CHECK(cell->row < grid.rows());
  CHECK_FALSE(grid.cell_of({0.0, 0.0}).has_value());
  // Corners land in corner cells.
  auto sw = grid.cell_of({bbox.min_lat, bbox.min_lon});
  REQUIRE(sw.has_value());
  CHECK(*sw == GridCell{0, 0});
  auto ne = grid.cell_of({bbox.max_lat, bbox.max_lon});
  REQUIRE(ne.has_value());
  CHECK(ne->row == grid.rows() - 1);
  CHECK(ne->col == grid.cols() - 1);
}

TEST_CASE("line reader handles crlf, missing newline and comments") {
  const char* path = "lr_test.csv";
  {
    std::ofstream out(path, std::ios::binary);
    out << "# manifest=abc\r\na,b\r\n1,2\nlast,line";
  }
  LineReader reader(path);
  REQUIRE(reader.is_open());
  std::string_view line;
  REQUIRE(reader.next(line));
  CHECK(LineReader::is_comment(line));
  REQUIRE(reader.next(line));
  CHECK(line == "a,b");
  REQUIRE(reader.next(line));
  CHECK(line == "1,2");
  REQUIRE(reader.next(line));
  CHECK(line == "last,line");
  CHECK_FALSE(reader.next(line));
  std::remove(path);
}

TEST_CASE("split and numeric parsing") {
  std::vector<std::string_view> fields;
  split_fields("a,,3.5,x", ',', fields);
  REQUIRE(fields.size() == 4);
  CHECK(fields[1].empty());
  double v;
  CHECK(parse_double("3.5", v));
  CHECK(v == 3.5);
  CHECK(parse_double(" 2.0 ", v));
  CHECK_FALSE(parse_double("abc", v));
  CHECK_FALSE(parse_double("", v));
  CHECK_FALSE(parse_double("1.5x", v));
}

TEST_CASE("deterministic number formatting round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 123456.789, 1e-9, 2.4}) {
    std::string s = format_double(v);
    double back;
    REQUIRE(parse_double(s, back));
    CHECK(back == v);
  }
}

TEST_CASE("rng streams are deterministic and bounded") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(10) < 10);
  }
  // Poisson mean sanity at the simulator's scale.
  Rng p(11);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += p.poisson(2.0);
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.03));
}
