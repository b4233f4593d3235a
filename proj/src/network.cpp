#include "busim/network.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>

#include "busim/geo.hpp"

namespace busim::net {

int Network::active_route_count() const {
  int n = 0;
  for (const Route& r : routes) n += r.active ? 1 : 0;
  return n;
}

long long Network::active_ride_edge_count() const {
  long long n = 0;
  for (const Route& r : routes) {
    if (r.active) n += 2LL * static_cast<long long>(r.seg_len_m.size());
  }
  return n;
}

std::vector<char> Network::active_stop_mask() const {
  std::vector<char> mask(stops.size(), 0);
  for (const Route& r : routes) {
    if (!r.active) continue;
    for (int s : r.stops) mask[s] = 1;
  }
  return mask;
}

std::vector<std::vector<int>> Network::hop_adjacency() const {
  std::vector<std::set<int>> adj(stops.size());
  for (const Route& r : routes) {
    if (!r.active) continue;
    for (size_t i = 0; i + 1 < r.stops.size(); ++i) {
      adj[r.stops[i]].insert(r.stops[i + 1]);
      adj[r.stops[i + 1]].insert(r.stops[i]);
    }
  }
  for (const auto& [a, b] : transfer_edges) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::vector<std::vector<int>> out(stops.size());
  for (size_t i = 0; i < adj.size(); ++i) {
    out[i].assign(adj[i].begin(), adj[i].end());
  }
  return out;
}

Network build_network(const Dataset& ds, const SimConfig& cfg) {
  Network net;
  net.stops = ds.stops;
  net.routes.reserve(ds.routes.size());
  for (size_t i = 0; i < ds.routes.size(); ++i) {
    const RouteDef& rd = ds.routes[i];
    Network::Route r;
    r.id = rd.id;
    r.stops = ds.route_stops[i];
    r.headway_min = rd.headway_min;
    r.capacity = rd.capacity;
    r.v_off_kmh = rd.v_off_kmh;
    r.first_departure_min = rd.first_departure_min;
    r.seg_len_m.reserve(r.stops.size() - 1);
    for (size_t k = 0; k + 1 < r.stops.size(); ++k) {
      const Stop& a = ds.stops[r.stops[k]];
      const Stop& b = ds.stops[r.stops[k + 1]];
      const double len = geo::haversine_m(a.lat, a.lon, b.lat, b.lon);
      if (!(len > 0.0)) {
        throw ValidationError("route " + r.id + ": stops " + a.id + " and " +
                              b.id + " are at the same coordinates");
      }
      r.seg_len_m.push_back(len);
      r.length_m += len;
    }
    net.route_index.emplace(r.id, static_cast<int>(net.routes.size()));
    net.routes.push_back(std::move(r));
  }

  geo::PointSet ps;
  for (const Stop& s : ds.stops) ps.add(s.lat, s.lon);
  for (const auto& [a, b] : ps.all_pairs_within(cfg.transfer_radius_m)) {
    net.transfer_edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  return net;
}

void remove_route(Network& net, const std::string& route_id) {
  auto it = net.route_index.find(route_id);
  if (it == net.route_index.end()) {
    throw ValidationError("unknown route " + route_id);
  }
  Network::Route& r = net.routes[it->second];
  if (!r.active) throw ValidationError("route " + route_id + " already removed");
  r.active = false;
}

std::vector<double> betweenness(const Network& net) {
  const auto adj = net.hop_adjacency();
  const int n = static_cast<int>(net.stops.size());
  std::vector<double> cb(n, 0.0);

  std::vector<int> dist(n);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<std::vector<int>> pred(n);
  std::vector<int> order;
  order.reserve(n);

  for (int s = 0; s < n; ++s) {
    if (adj[s].empty()) continue;
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : pred) p.clear();
    order.clear();

    dist[s] = 0;
    sigma[s] = 1.0;
    std::deque<int> queue = {s};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (int w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      for (int v : pred[w]) {
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) cb[w] += delta[w];
    }
  }
  return cb;
}

TopologyMetrics topology_metrics(const Network& net) {
  TopologyMetrics m;
  const auto mask = net.active_stop_mask();
  m.active_stops = static_cast<int>(std::count(mask.begin(), mask.end(), 1));
  m.ride_edges = net.active_ride_edge_count();
  if (m.active_stops >= 2) {
    m.density = static_cast<double>(m.ride_edges) /
                (static_cast<double>(m.active_stops) * (m.active_stops - 1));
  }

  const auto cb = betweenness(net);
  if (m.active_stops > 0) {
    double sum = 0.0;
    for (size_t i = 0; i < cb.size(); ++i) {
      if (mask[i]) sum += cb[i];
    }
    m.avg_betweenness = sum / m.active_stops;
  }

  const auto adj = net.hop_adjacency();
  const int n = static_cast<int>(net.stops.size());
  long long pair_count = 0;
  long long hop_sum = 0;
  std::vector<int> dist(n);
  for (int s = 0; s < n; ++s) {
    if (!mask[s]) continue;
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::deque<int> queue = {s};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
    }
    for (int t = 0; t < n; ++t) {
      if (t == s || !mask[t] || dist[t] < 0) continue;
      ++pair_count;
      hop_sum += dist[t];
    }
  }
  if (pair_count > 0) {
    m.avg_path_length = static_cast<double>(hop_sum) / static_cast<double>(pair_count);
  }
  return m;
}

void write_edges_csv(const Network& net, const std::string& path,
                     const std::string& meta_comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  if (!meta_comment.empty()) out << "# " << meta_comment << '\n';
  out << "from,to,route_id,length_m,kind\n";
  char buf[64];
  for (const Network::Route& r : net.routes) {
    if (!r.active) continue;
    for (size_t i = 0; i + 1 < r.stops.size(); ++i) {
      const std::string& a = net.stops[r.stops[i]].id;
      const std::string& b = net.stops[r.stops[i + 1]].id;
      snprintf(buf, sizeof(buf), "%.3f", r.seg_len_m[i]);
      out << a << ',' << b << ',' << r.id << ',' << buf << ",ride\n";
      out << b << ',' << a << ',' << r.id << ',' << buf << ",ride\n";
    }
  }
  for (const auto& [a, b] : net.transfer_edges) {
    const Stop& sa = net.stops[a];
    const Stop& sb = net.stops[b];
    snprintf(buf, sizeof(buf), "%.3f",
             geo::haversine_m(sa.lat, sa.lon, sb.lat, sb.lon));
    out << sa.id << ',' << sb.id << ",," << buf << ",transfer\n";
  }
}

}  // namespace busim::net
