#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "busim/types.hpp"

namespace busim::net {

// Multigraph over stops. Ride edges are directed and belong to a route (one
// pair per traversal direction per consecutive stop pair); transfer edges are
// undirected walk links between distinct stops within transfer_radius_m.
// Removing a route deactivates its ride edges; stops and transfer edges stay.
struct Network {
  struct Route {
    std::string id;
    std::vector<int> stops;        // indices into `stops`
    std::vector<double> seg_len_m; // size stops.size()-1, haversine per segment
    double length_m = 0.0;
    double headway_min = 15.0;
    int capacity = 60;
    double v_off_kmh = 20.0;
    double first_departure_min = 0.0;
    bool active = true;
  };

  std::vector<Stop> stops;
  std::vector<Route> routes;
  std::map<std::string, int> route_index;
  std::vector<std::pair<int, int>> transfer_edges;  // i < j

  int active_route_count() const;
  // directed ride edges over active routes (2 per segment), multigraph count
  long long active_ride_edge_count() const;
  // stops touched by at least one active ride edge
  std::vector<char> active_stop_mask() const;
  // unique-neighbor adjacency: active ride edges plus transfer edges, hop = 1
  std::vector<std::vector<int>> hop_adjacency() const;
};

Network build_network(const Dataset& ds, const SimConfig& cfg);

// Deactivates the route; throws ValidationError if unknown or already removed.
void remove_route(Network& net, const std::string& route_id);

// Unnormalized node betweenness (Brandes), shortest paths by hop count over
// hop_adjacency, fractional split across equal-length paths, endpoints
// excluded. Indexed by stop.
std::vector<double> betweenness(const Network& net);

struct TopologyMetrics {
  double density = 0.0;          // active ride edges / (n_act * (n_act - 1))
  double avg_betweenness = 0.0;  // mean over active stops
  double avg_path_length = 0.0;  // mean hops over connected ordered active pairs
  long long ride_edges = 0;
  int active_stops = 0;
};

TopologyMetrics topology_metrics(const Network& net);

void write_edges_csv(const Network& net, const std::string& path,
                     const std::string& meta_comment);

}  // namespace busim::net
