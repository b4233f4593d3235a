#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "busim/dataset.hpp"
#include "busim/network.hpp"
#include "busim/planner.hpp"
#include "busim/rng.hpp"
#include "busim/types.hpp"
#include "enumerate_plans.hpp"

using namespace busim;

namespace {

constexpr double kMPerDegLat = 111194.92664455873;

struct RouteSpec {
  std::vector<int> stops;
  double headway = 15.0;
};

Dataset make_dataset(const std::vector<std::pair<double, double>>& stops_m,
                     const std::vector<RouteSpec>& routes,
                     const std::vector<std::pair<int, int>>& ods = {}) {
  Dataset ds;
  for (size_t i = 0; i < stops_m.size(); ++i) {
    Stop s;
    s.id = "S" + std::to_string(i);
    s.lat = 40.0 + stops_m[i].second / kMPerDegLat;
    s.lon = 116.0 + stops_m[i].first / (kMPerDegLat * std::cos(40.0 * M_PI / 180.0));
    ds.stops.push_back(s);
  }
  for (size_t r = 0; r < routes.size(); ++r) {
    RouteDef rd;
    rd.id = "R" + std::to_string(r);
    for (int s : routes[r].stops) rd.stop_ids.push_back(ds.stops[s].id);
    rd.headway_min = routes[r].headway;
    ds.routes.push_back(rd);
  }
  int pid = 0;
  for (const auto& [o, d] : ods) {
    for (Group g : kAllGroups) {
      TripRecord t;
      t.passenger_id = "P" + std::to_string(pid++);
      t.group = g;
      t.origin_stop = ds.stops[o].id;
      t.dest_stop = ds.stops[d].id;
      t.departure_min = 480;
      ds.trips.push_back(t);
    }
  }
  ds.rebuild_indices();
  return ds;
}

}  // namespace

TEST_CASE("direct ride on a single route") {
  const Dataset ds =
      make_dataset({{0, 0}, {600, 0}, {1200, 0}}, {{{0, 1, 2}, 12.0}});
  const net::Network nw = net::build_network(ds, SimConfig{});
  const SensitivitySet sens = default_sensitivity();
  SimConfig cfg;

  const auto p = plan::plan_single(nw, 0, 2, Group::General, sens, cfg);
  REQUIRE(p.feasible);
  REQUIRE(p.legs.size() == 1);
  CHECK(p.legs[0].route == 0);
  CHECK(p.legs[0].board_stop == 0);
  CHECK(p.legs[0].alight_stop == 2);
  CHECK(p.legs[0].board_dir == +1);
  CHECK(p.legs[0].ride_segments == 2);
  CHECK(p.transfers() == 0);
  // waiting (12/2)/5 steps + two ride segments
  CHECK(p.planned_cost ==
        doctest::Approx(0.327 * 6.0 / 5.0 + 2 * 0.307).epsilon(1e-12));

  const auto back = plan::plan_single(nw, 2, 0, Group::General, sens, cfg);
  REQUIRE(back.feasible);
  CHECK(back.legs[0].board_dir == -1);
  CHECK(back.planned_cost == doctest::Approx(p.planned_cost).epsilon(1e-12));
}

TEST_CASE("transfer at a shared stop") {
  const Dataset ds = make_dataset({{0, 0}, {600, 0}, {600, 600}},
                                  {{{0, 1}, 10.0}, {{1, 2}, 20.0}});
  const net::Network nw = net::build_network(ds, SimConfig{});
  const SensitivitySet sens = default_sensitivity();
  SimConfig cfg;

  const auto p = plan::plan_single(nw, 0, 2, Group::Elderly, sens, cfg);
  REQUIRE(p.feasible);
  REQUIRE(p.legs.size() == 2);
  CHECK(p.legs[0].route == 0);
  CHECK(p.legs[1].route == 1);
  CHECK(p.legs[0].alight_stop == 1);
  CHECK(p.legs[1].board_stop == 1);
  CHECK(p.transfers() == 1);
  const auto& w = sens.of(Group::Elderly);
  CHECK(p.planned_cost ==
        doctest::Approx(w.waiting * (5.0 / 5.0 + 10.0 / 5.0) + w.transfer +
                        2 * w.travel)
            .epsilon(1e-12));
}

TEST_CASE("transfer walk bridges nearby stops") {
  // second route starts 200 m from the first's end; 300 m walk radius
  const Dataset ds = make_dataset({{0, 0}, {600, 0}, {600, 200}, {600, 800}},
                                  {{{0, 1}, 10.0}, {{2, 3}, 10.0}});
  const net::Network nw = net::build_network(ds, SimConfig{});
  const SensitivitySet sens = default_sensitivity();
  SimConfig cfg;

  const auto p = plan::plan_single(nw, 0, 3, Group::Student, sens, cfg);
  REQUIRE(p.feasible);
  REQUIRE(p.legs.size() == 2);
  CHECK(p.legs[0].alight_stop == 1);
  CHECK(p.legs[1].board_stop == 2);

  // the walk must not substitute for the final alight: planning into the
  // walk-only neighbor of the destination stays a ride to the stop itself
  const auto q = plan::plan_single(nw, 0, 2, Group::Student, sens, cfg);
  REQUIRE(q.feasible);
  CHECK(q.legs.back().alight_stop == 2);
}

TEST_CASE("unreachable destinations are reported infeasible") {
  const Dataset ds = make_dataset({{0, 0}, {600, 0}, {3000, 3000}, {3600, 3000}},
                                  {{{0, 1}, 10.0}, {{2, 3}, 10.0}});
  const net::Network nw = net::build_network(ds, SimConfig{});
  const auto p =
      plan::plan_single(nw, 0, 3, Group::General, default_sensitivity(), SimConfig{});
  CHECK_FALSE(p.feasible);
  CHECK(p.legs.empty());
}

TEST_CASE("plan cost matches exhaustive enumeration on random fixtures") {
  const SensitivitySet sens = default_sensitivity();
  SimConfig cfg;
  Rng rng(777);

  for (int rep = 0; rep < 20; ++rep) {
    const int n_stops = 6 + static_cast<int>(rng.uniform_u64(7));  // <= 12
    const double box = rep % 2 == 0 ? 2500.0 : 1200.0;  // odd reps force walks
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < n_stops; ++i) {
      for (;;) {
        const double x = rng.uniform(0.0, box);
        const double y = rng.uniform(0.0, box);
        bool clear = true;
        for (const auto& p : pts) {
          const double dx = p.first - x, dy = p.second - y;
          if (dx * dx + dy * dy < 40.0 * 40.0) clear = false;
        }
        if (clear) {
          pts.emplace_back(x, y);
          break;
        }
      }
    }
    const int n_routes = 2 + static_cast<int>(rng.uniform_u64(5));  // <= 6
    std::vector<RouteSpec> routes;
    for (int r = 0; r < n_routes; ++r) {
      const int len = 2 + static_cast<int>(rng.uniform_u64(4));
      RouteSpec spec;
      for (int k = 0; k < len; ++k) {
        int s;
        do {
          s = static_cast<int>(rng.uniform_u64(n_stops));
        } while (!spec.stops.empty() && s == spec.stops.back());
        spec.stops.push_back(s);
      }
      spec.headway = static_cast<double>(6 + 2 * rng.uniform_u64(13));
      routes.push_back(spec);
    }

    std::vector<std::pair<int, int>> ods;
    for (int k = 0; k < 6; ++k) {
      ods.emplace_back(static_cast<int>(rng.uniform_u64(n_stops)),
                       static_cast<int>(rng.uniform_u64(n_stops)));
    }
    const Dataset ds = make_dataset(pts, routes, ods);
    net::Network nw = net::build_network(ds, cfg);

    const auto plans = plan::plan_all(nw, ds, sens, cfg);
    REQUIRE(plans.size() == ds.trips.size());

    for (size_t i = 0; i < plans.size(); ++i) {
      const TripRecord& t = ds.trips[i];
      const int o = ds.stop_index.at(t.origin_stop);
      const int d = ds.stop_index.at(t.dest_stop);
      const double want =
          testoracle::enumerate_best_cost(nw, cfg, o, d, sens.of(t.group));

      if (!plans[i].feasible) {
        CHECK(std::isinf(want));
        continue;
      }
      CHECK(plans[i].transfers() <= cfg.transfer_cap);
      CHECK(plans[i].planned_cost == doctest::Approx(want).epsilon(1e-12));
      // plan_all must agree with the one-off entry point
      const auto single = plan::plan_single(nw, o, d, t.group, sens, cfg);
      CHECK(single.planned_cost == plans[i].planned_cost);
      CHECK(single.legs.size() == plans[i].legs.size());
    }

    // every single-route removal: surviving trips never get cheaper plans,
    // infeasible trips never become feasible
    for (int r = 0; r < n_routes; ++r) {
      net::Network cut = nw;
      net::remove_route(cut, "R" + std::to_string(r));
      auto replanned = plans;
      plan::replan_affected(cut, ds, sens, cfg, replanned);
      for (size_t i = 0; i < plans.size(); ++i) {
        if (!plans[i].feasible) {
          CHECK_FALSE(replanned[i].feasible);
          continue;
        }
        if (replanned[i].feasible) {
          CHECK(replanned[i].planned_cost >= plans[i].planned_cost - 1e-12);
          CHECK_FALSE(replanned[i].uses_inactive_route(cut));
          const TripRecord& t = ds.trips[i];
          const double want = testoracle::enumerate_best_cost(
              cut, cfg, ds.stop_index.at(t.origin_stop),
              ds.stop_index.at(t.dest_stop), sens.of(t.group));
          CHECK(replanned[i].planned_cost == doctest::Approx(want).epsilon(1e-12));
        }
        // untouched plans must be byte-for-byte the old ones
        if (!plans[i].uses_inactive_route(cut)) {
          CHECK(replanned[i].planned_cost == plans[i].planned_cost);
          CHECK(replanned[i].legs.size() == plans[i].legs.size());
        }
      }
    }
  }
}

TEST_CASE("planning is deterministic across calls") {
  const Dataset ds = make_dataset(
      {{0, 0}, {600, 0}, {1200, 0}, {600, 600}, {1200, 600}},
      {{{0, 1, 2}, 10.0}, {{1, 3, 4}, 10.0}, {{0, 3}, 10.0}},
      {{0, 4}, {2, 3}, {4, 0}});
  const net::Network nw = net::build_network(ds, SimConfig{});
  const SensitivitySet sens = default_sensitivity();
  const auto a = plan::plan_all(nw, ds, sens, SimConfig{});
  const auto b = plan::plan_all(nw, ds, sens, SimConfig{});
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].feasible == b[i].feasible);
    CHECK(a[i].planned_cost == b[i].planned_cost);
    REQUIRE(a[i].legs.size() == b[i].legs.size());
    for (size_t l = 0; l < a[i].legs.size(); ++l) {
      CHECK(a[i].legs[l].route == b[i].legs[l].route);
      CHECK(a[i].legs[l].board_stop == b[i].legs[l].board_stop);
      CHECK(a[i].legs[l].alight_stop == b[i].legs[l].alight_stop);
      CHECK(a[i].legs[l].board_dir == b[i].legs[l].board_dir);
      CHECK(a[i].legs[l].ride_segments == b[i].legs[l].ride_segments);
    }
  }
}
