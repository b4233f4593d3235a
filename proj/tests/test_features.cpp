#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "busim/csv.hpp"
#include "busim/dataset.hpp"
#include "busim/features.hpp"
#include "busim/network.hpp"
#include "busim/planner.hpp"
#include "busim/types.hpp"

using namespace busim;

namespace {

constexpr double kMPerDegLat = 111194.92664455873;

double lat_of(double y_m) { return 40.0 + y_m / kMPerDegLat; }
double lon_of(double x_m) {
  return 116.0 + x_m / (kMPerDegLat * std::cos(40.0 * M_PI / 180.0));
}

struct Fixture {
  Dataset ds;
  net::Network nw;
  std::vector<plan::TripPlan> plans;
  SimConfig cfg;

  std::vector<feat::RouteFeatures> features() const {
    return feat::compute_route_features(nw, ds, plans, cfg);
  }
};

Fixture build(const std::vector<std::pair<double, double>>& stops_m,
              const std::vector<std::vector<int>>& routes,
              const std::vector<std::pair<int, int>>& ods = {},
              const std::vector<std::pair<std::pair<double, double>, std::string>>&
                  pois = {}) {
  Fixture fx;
  for (size_t i = 0; i < stops_m.size(); ++i) {
    Stop s;
    s.id = "S" + std::to_string(i);
    s.lat = lat_of(stops_m[i].second);
    s.lon = lon_of(stops_m[i].first);
    fx.ds.stops.push_back(s);
  }
  for (size_t r = 0; r < routes.size(); ++r) {
    RouteDef rd;
    rd.id = "R" + std::to_string(r);
    for (int s : routes[r]) rd.stop_ids.push_back(fx.ds.stops[s].id);
    fx.ds.routes.push_back(rd);
  }
  int pid = 0;
  for (const auto& [o, d] : ods) {
    TripRecord t;
    t.passenger_id = "P" + std::to_string(pid++);
    t.group = Group::General;
    t.origin_stop = fx.ds.stops[o].id;
    t.dest_stop = fx.ds.stops[d].id;
    t.departure_min = 480;
    fx.ds.trips.push_back(t);
  }
  for (size_t i = 0; i < pois.size(); ++i) {
    PoiRecord p;
    p.id = "POI" + std::to_string(i);
    p.lon = lon_of(pois[i].first.first);
    p.lat = lat_of(pois[i].first.second);
    p.category = pois[i].second;
    fx.ds.pois.push_back(p);
  }
  fx.ds.rebuild_indices();
  fx.nw = net::build_network(fx.ds, fx.cfg);
  fx.plans = plan::plan_all(fx.nw, fx.ds, default_sensitivity(), fx.cfg);
  return fx;
}

}  // namespace

TEST_CASE("ridership counts distinct plans riding the route") {
  // R0 carries the direct trips; the 0->3 trip rides R0 then R1
  const Fixture fx = build({{0, 0}, {600, 0}, {1200, 0}, {1200, 600}},
                           {{0, 1, 2}, {2, 3}},
                           {{0, 2}, {1, 2}, {0, 3}, {3, 2}});
  const auto f = fx.features();
  REQUIRE(f.size() == 2);
  CHECK(f[0].route_id == "R0");
  CHECK(f[0].ridership == 3);  // trips 0, 1 and the first leg of trip 2
  CHECK(f[1].ridership == 2);  // trips 2 and 3
}

TEST_CASE("structural contributions have hand-checkable values") {
  // triangle where R2 is the only direct A<->C link
  const Fixture fx =
      build({{0, 0}, {900, 0}, {450, 900}}, {{0, 1}, {1, 2}, {0, 2}});
  const auto f = fx.features();
  REQUIRE(f.size() == 3);

  // removing R2 keeps all three stops active via R0/R1 but forces two hops
  // between its endpoints: APL goes from 1 to 8/6
  CHECK(f[2].avg_path_length_delta == doctest::Approx(8.0 / 6.0 - 1.0).epsilon(1e-12));
  // density drops from 6/(3*2) to 4/(3*2)
  CHECK(f[2].density_contrib == doctest::Approx(2.0 / 6.0).epsilon(1e-12));

  // with R2 present the graph is complete, so every betweenness is zero
  CHECK(f[0].avg_betweenness == 0.0);
}

TEST_CASE("stop spacing drives the sparse station ratio") {
  // S0-S1 are 200 m apart; S2 and S3 only have a 900 m neighbor
  const Fixture fx =
      build({{0, 0}, {200, 0}, {3000, 0}, {3900, 0}}, {{0, 1, 2, 3}});
  const auto f = fx.features();
  REQUIRE(f.size() == 1);
  CHECK(f[0].sparse_station_ratio == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("amenity entropy over poi categories within the buffer") {
  const Fixture fx = build(
      {{0, 0}, {600, 0}, {5000, 5000}, {5600, 5000}}, {{0, 1}, {2, 3}}, {},
      {{{0, 100}, "food"},
       {{0, -100}, "school"},
       {{600, 100}, "clinic"},
       {{600, -100}, "shop"},
       {{0, 450}, "food"},       // 450 m away: outside the 300 m buffer
       {{5000, 5100}, "food"},   // second route: single category
       {{5600, 5100}, "food"}});
  const auto f = fx.features();
  REQUIRE(f.size() == 2);
  CHECK(f[0].amenity_entropy == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(f[1].amenity_entropy == 0.0);
  CHECK(f[0].pois_present);

  const Fixture bare = build({{0, 0}, {600, 0}}, {{0, 1}});
  const auto g = bare.features();
  CHECK_FALSE(g[0].pois_present);
  CHECK(g[0].amenity_entropy == 0.0);
}

TEST_CASE("scores are weighted z-scores with deterministic ranks") {
  std::vector<feat::RouteFeatures> f(3);
  f[0].route_id = "R0";
  f[1].route_id = "R1";
  f[2].route_id = "R2";
  f[0].ridership = 10;
  f[1].ridership = 20;
  f[2].ridership = 30;

  const auto scores =
      feat::score_routes(f, "capacity", {{"ridership", 0.270}});
  REQUIRE(scores.size() == 3);
  const double z = std::sqrt(1.5);  // z-score of the extremes
  CHECK(scores[0].score == doctest::Approx(-0.270 * z).epsilon(1e-12));
  CHECK(scores[1].score == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(scores[2].score == doctest::Approx(0.270 * z).epsilon(1e-12));
  CHECK(scores[0].rank == 1);
  CHECK(scores[1].rank == 2);
  CHECK(scores[2].rank == 3);
  CHECK(scores[0].dimension == "capacity");

  // shifting a feature by a constant changes nothing after z-scoring
  auto shifted = f;
  for (auto& r : shifted) r.ridership += 1000;
  const auto s2 = feat::score_routes(shifted, "capacity", {{"ridership", 0.270}});
  for (size_t i = 0; i < scores.size(); ++i) {
    CHECK(s2[i].score == doctest::Approx(scores[i].score).epsilon(1e-12));
    CHECK(s2[i].rank == scores[i].rank);
  }

  // negative weight flips the ordering
  const auto neg = feat::score_routes(f, "capacity", {{"ridership", -1.0}});
  CHECK(neg[0].rank == 3);
  CHECK(neg[2].rank == 1);
}

TEST_CASE("multi-feature scores combine independent z-scores") {
  std::vector<feat::RouteFeatures> f(3);
  for (int i = 0; i < 3; ++i) f[i].route_id = "R" + std::to_string(i);
  f[0].density_contrib = 0.1;
  f[1].density_contrib = 0.2;
  f[2].density_contrib = 0.3;
  f[0].avg_betweenness = 4.0;
  f[1].avg_betweenness = 0.0;
  f[2].avg_betweenness = 2.0;
  f[0].avg_path_length_delta = 0.0;
  f[1].avg_path_length_delta = 0.0;
  f[2].avg_path_length_delta = 0.6;

  const std::map<std::string, double> w{{"density", -0.192},
                                        {"avg_betweenness", 0.254},
                                        {"avg_path_length", -0.263}};
  const auto scores = feat::score_routes(f, "structure", w);

  auto zval = [](double x, double m, double sd) { return (x - m) / sd; };
  const double sd_d = std::sqrt((0.01 + 0.0 + 0.01) / 3.0);
  const double sd_b = std::sqrt((4.0 + 4.0 + 0.0) / 3.0);
  const double sd_p = std::sqrt((0.04 + 0.04 + 0.16) / 3.0);  // sd of {0,0,.6}
  for (int i = 0; i < 3; ++i) {
    const double want = -0.192 * zval(f[i].density_contrib, 0.2, sd_d) +
                        0.254 * zval(f[i].avg_betweenness, 2.0, sd_b) +
                        -0.263 * zval(f[i].avg_path_length_delta, 0.2, sd_p);
    CHECK(scores[i].score == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("zero-variance features contribute nothing and warn") {
  std::vector<feat::RouteFeatures> f(2);
  f[0].route_id = "R0";
  f[1].route_id = "R1";
  f[0].ridership = 7;
  f[1].ridership = 7;

  std::vector<std::string> warnings;
  const auto scores =
      feat::score_routes(f, "capacity", {{"ridership", 0.270}}, &warnings);
  CHECK(scores[0].score == 0.0);
  CHECK(scores[1].score == 0.0);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0] ==
        "feature 'ridership' has zero variance across capacity scoring; "
        "contribution set to 0");

  // equal scores rank by route id
  CHECK(scores[0].rank == 1);
  CHECK(scores[1].rank == 2);
}

TEST_CASE("unknown feature names are rejected") {
  std::vector<feat::RouteFeatures> f(2);
  f[0].route_id = "R0";
  f[1].route_id = "R1";
  CHECK_THROWS_WITH_AS(feat::score_routes(f, "capacity", {{"riderships", 1.0}}),
                       "unknown feature 'riderships' in coefficients",
                       ValidationError);
}

TEST_CASE("default weights cover the three dimensions") {
  const auto coef = feat::default_coefficients();
  REQUIRE(feat::dimension_names() ==
          std::vector<std::string>{"capacity", "structure", "function"});
  CHECK(coef.at("capacity").at("ridership") == 0.270);
  CHECK(coef.at("structure").at("density") == -0.192);
  CHECK(coef.at("structure").at("avg_betweenness") == 0.254);
  CHECK(coef.at("structure").at("avg_path_length") == -0.263);
  CHECK(coef.at("function").at("sparse_station_ratio") == -0.384);
  CHECK(coef.at("function").at("amenity_entropy") == -0.069);
}

TEST_CASE("feature and score tables round-trip through csv") {
  std::vector<feat::RouteFeatures> f(2);
  f[0].route_id = "R0";
  f[0].ridership = 5;
  f[0].density_contrib = 0.125;
  f[0].avg_betweenness = 1.5;
  f[0].avg_path_length_delta = 0.25;
  f[0].sparse_station_ratio = 0.5;
  f[0].amenity_entropy = 1.0986122886681098;
  f[1].route_id = "R1";
  f[1].ridership = 9;

  const std::string fpath = "/tmp/busim_test_features.csv";
  feat::write_features_csv(fpath, f, "meta line");
  const auto table = csv::read_file(fpath);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.header ==
        std::vector<std::string>{"route_id", "ridership", "density",
                                 "avg_betweenness", "avg_path_length",
                                 "sparse_station_ratio", "amenity_entropy"});
  CHECK(table.cell(0, 0) == "R0");
  CHECK(table.integer(0, 1) == 5);
  CHECK(table.number(0, 6) == 1.0986122886681098);  // exact round-trip

  const auto scores = feat::score_routes(f, "capacity", {{"ridership", 1.0}});
  const std::string spath = "/tmp/busim_test_scores.csv";
  feat::write_scores_csv(spath, scores, "meta line");
  const auto stable = csv::read_file(spath);
  REQUIRE(stable.rows.size() == 2);
  CHECK(stable.header ==
        std::vector<std::string>{"route_id", "dimension", "score", "rank"});
  CHECK(stable.cell(0, 1) == "capacity");
  CHECK(stable.integer(0, 3) == 1);
  std::remove(fpath.c_str());
  std::remove(spath.c_str());
}
