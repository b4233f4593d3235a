#include <doctest.h>

#include <cmath>
#include <string>

#include "busim/csv.hpp"
#include "busim/geo.hpp"
#include "busim/rng.hpp"
#include "busim/types.hpp"

using namespace busim;

TEST_CASE("haversine matches the one-degree meridian arc") {
  // 1 degree of latitude = pi/180 * 6371000 m
  const double d = geo::haversine_m(0.0, 0.0, 1.0, 0.0);
  CHECK(d == doctest::Approx(111194.9266).epsilon(1e-6));
  CHECK(geo::haversine_m(40.0, 116.0, 40.0, 116.0) == 0.0);
}

TEST_CASE("haversine is symmetric and respects the triangle inequality") {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const double a1 = rng.uniform(-80, 80), o1 = rng.uniform(-180, 180);
    const double a2 = rng.uniform(-80, 80), o2 = rng.uniform(-180, 180);
    const double a3 = rng.uniform(-80, 80), o3 = rng.uniform(-180, 180);
    const double d12 = geo::haversine_m(a1, o1, a2, o2);
    const double d21 = geo::haversine_m(a2, o2, a1, o1);
    CHECK(d12 == doctest::Approx(d21).epsilon(1e-12));
    const double d13 = geo::haversine_m(a1, o1, a3, o3);
    const double d23 = geo::haversine_m(a2, o2, a3, o3);
    CHECK(d13 <= d12 + d23 + 1e-6);
  }
}

TEST_CASE("radius query agrees with a direct haversine filter") {
  Rng rng(77);
  geo::PointSet ps;
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 300; ++i) {
    const double lat = 40.3 + rng.uniform(-0.05, 0.05);
    const double lon = 116.6 + rng.uniform(-0.05, 0.05);
    ps.add(lat, lon);
    pts.emplace_back(lat, lon);
  }
  for (int q = 0; q < 20; ++q) {
    const double qlat = 40.3 + rng.uniform(-0.05, 0.05);
    const double qlon = 116.6 + rng.uniform(-0.05, 0.05);
    const double r = rng.uniform(100.0, 2000.0);
    const auto got = ps.radius_query(qlat, qlon, r);
    std::vector<uint32_t> want;
    for (uint32_t i = 0; i < pts.size(); ++i) {
      if (geo::haversine_m(qlat, qlon, pts[i].first, pts[i].second) <= r) {
        want.push_back(i);
      }
    }
    CHECK(got == want);
  }
}

TEST_CASE("all pairs within radius matches brute force") {
  Rng rng(93);
  geo::PointSet ps;
  for (int i = 0; i < 120; ++i) {
    ps.add(40.3 + rng.uniform(-0.01, 0.01), 116.6 + rng.uniform(-0.01, 0.01));
  }
  const double r = 400.0;
  const auto got = ps.all_pairs_within(r);
  std::vector<std::pair<uint32_t, uint32_t>> want;
  for (uint32_t i = 0; i < ps.size(); ++i) {
    for (uint32_t j = i + 1; j < ps.size(); ++j) {
      if (geo::haversine_m(ps.lat(i), ps.lon(i), ps.lat(j), ps.lon(j)) <= r) {
        want.emplace_back(i, j);
      }
    }
  }
  CHECK(got == want);
}

TEST_CASE("csv reader reports location on malformed rows") {
  const std::string text =
      "stop_id,lat,lon\n"
      "S1,40.0,116.0\n"
      "S2,oops,116.1\n";
  const csv::Table t = csv::read_string(text, "stops.csv");
  CHECK(t.rows.size() == 2);
  CHECK_THROWS_WITH_AS(t.number(1, 1),
                      "stops.csv:3: column 2: 'oops' is not a number",
                      ValidationError);
}

TEST_CASE("csv reader rejects ragged rows with the line number") {
  const std::string text = "a,b\n1,2\n3\n";
  CHECK_THROWS_WITH_AS(csv::read_string(text, "t.csv"),
                       "t.csv:3: expected 2 fields, got 1", ValidationError);
}

TEST_CASE("csv reader skips blank and comment lines") {
  const std::string text = "# meta line\na,b\n\n1,2\n# trailing comment\n3,4\n";
  const csv::Table t = csv::read_string(text, "t.csv");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.cell(0, 0) == "1");
  CHECK(t.cell(1, 1) == "4");
  CHECK(t.line_of_row[1] == 6);
}

TEST_CASE("missing column is named in the error") {
  const csv::Table t = csv::read_string("a,b\n1,2\n", "t.csv");
  CHECK(t.column("zz") == -1);
  CHECK_THROWS_WITH_AS(t.require_column("zz"),
                       "t.csv:1: missing required column 'zz'", ValidationError);
}

TEST_CASE("format_double round-trips exactly") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform_int(-6, 6));
    const std::string s = csv::format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(csv::format_double(0.5) == "0.5");
  CHECK(csv::format_double(-3.0) == "-3");
}
