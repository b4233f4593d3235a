#include <doctest.h>

#include <cmath>
#include <queue>
#include <set>
#include <vector>

#include "busim/dataset.hpp"
#include "busim/geo.hpp"
#include "busim/network.hpp"
#include "busim/rng.hpp"
#include "busim/types.hpp"

using namespace busim;

namespace {

constexpr double kMPerDegLat = 111194.92664455873;  // pi/180 * earth radius

Dataset make_dataset(const std::vector<std::pair<double, double>>& stops_m,
                     const std::vector<std::vector<int>>& routes) {
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
    for (int s : routes[r]) rd.stop_ids.push_back(ds.stops[s].id);
    ds.routes.push_back(rd);
  }
  ds.rebuild_indices();
  return ds;
}

// independent check: per-(s,t) path counting over BFS distances instead of
// the library's dependency accumulation
struct Brute {
  std::vector<double> betweenness;
  double apl = 0.0;  // over connected ordered active pairs
};

Brute brute_force(const net::Network& nw) {
  const size_t n = nw.stops.size();
  std::vector<std::set<int>> adj(n);
  for (const auto& r : nw.routes) {
    if (!r.active) continue;
    for (size_t i = 0; i + 1 < r.stops.size(); ++i) {
      adj[r.stops[i]].insert(r.stops[i + 1]);
      adj[r.stops[i + 1]].insert(r.stops[i]);
    }
  }
  for (const auto& [a, b] : nw.transfer_edges) {
    adj[a].insert(b);
    adj[b].insert(a);
  }

  std::vector<std::vector<long long>> dist(n, std::vector<long long>(n, -1));
  std::vector<std::vector<double>> paths(n, std::vector<double>(n, 0.0));
  for (size_t s = 0; s < n; ++s) {
    dist[s][s] = 0;
    paths[s][s] = 1.0;
    std::queue<int> q;
    q.push(static_cast<int>(s));
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (dist[s][v] < 0) {
          dist[s][v] = dist[s][u] + 1;
          q.push(v);
        }
        if (dist[s][v] == dist[s][u] + 1) paths[s][v] += paths[s][u];
      }
    }
  }

  Brute out;
  out.betweenness.assign(n, 0.0);
  for (size_t s = 0; s < n; ++s) {
    for (size_t t = 0; t < n; ++t) {
      if (s == t || dist[s][t] < 0) continue;
      for (size_t v = 0; v < n; ++v) {
        if (v == s || v == t) continue;
        if (dist[s][v] >= 0 && dist[v][t] >= 0 &&
            dist[s][v] + dist[v][t] == dist[s][t]) {
          out.betweenness[v] += paths[s][v] * paths[v][t] / paths[s][t];
        }
      }
    }
  }

  const auto active = nw.active_stop_mask();
  double sum = 0.0;
  long long cnt = 0;
  for (size_t s = 0; s < n; ++s) {
    if (!active[s]) continue;
    for (size_t t = 0; t < n; ++t) {
      if (s == t || !active[t] || dist[s][t] < 0) continue;
      sum += static_cast<double>(dist[s][t]);
      ++cnt;
    }
  }
  out.apl = cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
  return out;
}

}  // namespace

TEST_CASE("two-stop route yields one ride edge per direction") {
  const Dataset ds = make_dataset({{0, 0}, {600, 0}}, {{0, 1}});
  const net::Network nw = net::build_network(ds, SimConfig{});
  CHECK(nw.active_ride_edge_count() == 2);
  CHECK(nw.transfer_edges.empty());
  const auto m = net::topology_metrics(nw);
  CHECK(m.density == doctest::Approx(1.0));  // 2 edges / (2*1)
  CHECK(m.avg_path_length == doctest::Approx(1.0));
}

TEST_CASE("path graph betweenness puts 2 on the middle stop") {
  const Dataset ds = make_dataset({{0, 0}, {600, 0}, {1200, 0}}, {{0, 1, 2}});
  const net::Network nw = net::build_network(ds, SimConfig{});
  const auto b = net::betweenness(nw);
  CHECK(b[0] == doctest::Approx(0.0));
  CHECK(b[1] == doctest::Approx(2.0));  // ordered pairs 0->2 and 2->0
  CHECK(b[2] == doctest::Approx(0.0));
  const auto m = net::topology_metrics(nw);
  CHECK(m.avg_path_length == doctest::Approx(8.0 / 6.0));
}

TEST_CASE("star center carries all cross pairs") {
  // center stop 0, four leaves, one 2-stop route per leaf
  const Dataset ds = make_dataset(
      {{0, 0}, {600, 0}, {-600, 0}, {0, 600}, {0, -600}},
      {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const net::Network nw = net::build_network(ds, SimConfig{});
  const auto b = net::betweenness(nw);
  CHECK(b[0] == doctest::Approx(12.0));  // 4*3 ordered leaf pairs
  for (int leaf = 1; leaf <= 4; ++leaf) CHECK(b[leaf] == doctest::Approx(0.0));
}

TEST_CASE("transfer edges appear only within the radius") {
  SimConfig cfg;
  cfg.transfer_radius_m = 300.0;
  const Dataset ds = make_dataset({{0, 0}, {600, 0}, {600, 250}, {600, 1000}},
                                  {{0, 1}, {2, 3}});
  const net::Network nw = net::build_network(ds, cfg);
  REQUIRE(nw.transfer_edges.size() == 1);
  CHECK(nw.transfer_edges[0] == std::pair<int, int>{1, 2});
}

TEST_CASE("coincident consecutive stops are rejected") {
  const Dataset ds = make_dataset({{0, 0}, {0, 0}}, {{0, 1}});
  CHECK_THROWS_AS(net::build_network(ds, SimConfig{}), ValidationError);
}

TEST_CASE("remove_route drops exactly its ride edges and keeps transfers") {
  SimConfig cfg;
  const Dataset ds = make_dataset({{0, 0}, {600, 0}, {650, 250}, {1250, 250}},
                                  {{0, 1}, {2, 3}});
  net::Network nw = net::build_network(ds, cfg);
  const auto transfers_before = nw.transfer_edges;
  CHECK(nw.active_ride_edge_count() == 4);
  net::remove_route(nw, "R0");
  CHECK(nw.active_ride_edge_count() == 2);
  CHECK(nw.active_route_count() == 1);
  CHECK(nw.transfer_edges == transfers_before);
  CHECK(nw.stops.size() == 4);
  CHECK_THROWS_AS(net::remove_route(nw, "R0"), ValidationError);   // already gone
  CHECK_THROWS_AS(net::remove_route(nw, "RX"), ValidationError);   // unknown
}

TEST_CASE("metrics match brute force on random fixtures") {
  Rng rng(2024);
  for (int rep = 0; rep < 50; ++rep) {
    const int n_stops = 4 + static_cast<int>(rng.uniform_u64(12));  // <= 15
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < n_stops; ++i) {
      for (;;) {
        const double x = rng.uniform(0.0, 3000.0);
        const double y = rng.uniform(0.0, 3000.0);
        bool clear = true;
        for (const auto& p : pts) {
          const double dx = p.first - x, dy = p.second - y;
          if (dx * dx + dy * dy < 50.0 * 50.0) clear = false;
        }
        if (clear) {
          pts.emplace_back(x, y);
          break;
        }
      }
    }
    const int n_routes = 1 + static_cast<int>(rng.uniform_u64(4));
    std::vector<std::vector<int>> routes;
    for (int r = 0; r < n_routes; ++r) {
      const int len = 2 + static_cast<int>(rng.uniform_u64(5));
      std::vector<int> seq;
      for (int k = 0; k < len; ++k) {
        int s;
        do {
          s = static_cast<int>(rng.uniform_u64(n_stops));
        } while (!seq.empty() && s == seq.back());
        seq.push_back(s);
      }
      routes.push_back(seq);
    }
    const Dataset ds = make_dataset(pts, routes);
    net::Network nw = net::build_network(ds, SimConfig{});

    // also exercise a removal on half the reps so inactive routes are covered
    if (rep % 2 == 1 && nw.active_route_count() > 1) {
      net::remove_route(nw, "R0");
    }

    const Brute want = brute_force(nw);
    const auto got_b = net::betweenness(nw);
    REQUIRE(got_b.size() == want.betweenness.size());
    for (size_t i = 0; i < got_b.size(); ++i) {
      CHECK(got_b[i] == doctest::Approx(want.betweenness[i]).epsilon(1e-9));
    }
    const auto m = net::topology_metrics(nw);
    CHECK(m.avg_path_length == doctest::Approx(want.apl).epsilon(1e-9));

    // density definition check
    const auto active = nw.active_stop_mask();
    long long n_act = 0;
    for (char a : active) n_act += a ? 1 : 0;
    if (n_act > 1) {
      CHECK(m.density ==
            doctest::Approx(static_cast<double>(nw.active_ride_edge_count()) /
                            (static_cast<double>(n_act) * (n_act - 1)))
                .epsilon(1e-12));
    }
  }
}
