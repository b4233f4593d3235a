#include "busim/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "busim/csv.hpp"
#include "busim/geo.hpp"
#include "busim/statkit.hpp"

namespace busim::feat {

Coefficients default_coefficients() {
  return Coefficients{
      {"capacity", {{"ridership", 0.270}}},
      {"structure",
       {{"density", -0.192},
        {"avg_betweenness", 0.254},
        {"avg_path_length", -0.263}}},
      {"function", {{"sparse_station_ratio", -0.384}, {"amenity_entropy", -0.069}}},
  };
}

const std::vector<std::string>& dimension_names() {
  static const std::vector<std::string> kNames{"capacity", "structure", "function"};
  return kNames;
}

std::vector<RouteFeatures> compute_route_features(
    const net::Network& network, const Dataset& ds,
    const std::vector<plan::TripPlan>& plans, const SimConfig& cfg) {
  std::vector<long long> ridership(network.routes.size(), 0);
  for (const plan::TripPlan& p : plans) {
    if (!p.feasible) continue;
    std::set<int> used;
    for (const plan::Leg& leg : p.legs) used.insert(leg.route);
    for (int r : used) ridership[static_cast<size_t>(r)] += 1;
  }

  const std::vector<double> betw = net::betweenness(network);
  const net::TopologyMetrics base = net::topology_metrics(network);

  geo::PointSet stop_points;
  for (const Stop& s : network.stops) stop_points.add(s.lat, s.lon);

  geo::PointSet poi_points;
  for (const PoiRecord& p : ds.pois) poi_points.add(p.lat, p.lon);

  std::vector<RouteFeatures> out;
  for (size_t r = 0; r < network.routes.size(); ++r) {
    const net::Network::Route& route = network.routes[r];
    if (!route.active) continue;

    RouteFeatures f;
    f.route_id = route.id;
    f.ridership = ridership[r];
    f.pois_present = !ds.pois.empty();

    std::vector<int> unique_stops(route.stops.begin(), route.stops.end());
    std::sort(unique_stops.begin(), unique_stops.end());
    unique_stops.erase(std::unique(unique_stops.begin(), unique_stops.end()),
                       unique_stops.end());

    double bsum = 0.0;
    for (int s : unique_stops) bsum += betw[static_cast<size_t>(s)];
    f.avg_betweenness = bsum / static_cast<double>(unique_stops.size());

    // leave-one-out structural deltas
    net::Network reduced = network;
    net::remove_route(reduced, route.id);
    const net::TopologyMetrics rm = net::topology_metrics(reduced);
    f.density_contrib = base.density - rm.density;
    f.avg_path_length_delta = rm.avg_path_length - base.avg_path_length;

    int sparse = 0;
    for (int s : unique_stops) {
      const Stop& stop = network.stops[static_cast<size_t>(s)];
      // the query set contains the stop itself, so "no other stop within
      // the threshold" shows up as a single hit
      const auto near =
          stop_points.radius_query(stop.lat, stop.lon, cfg.sparse_distance_m);
      if (near.size() <= 1) ++sparse;
    }
    f.sparse_station_ratio =
        static_cast<double>(sparse) / static_cast<double>(unique_stops.size());

    if (!ds.pois.empty()) {
      std::set<size_t> nearby;
      for (int s : unique_stops) {
        const Stop& stop = network.stops[static_cast<size_t>(s)];
        for (size_t idx :
             poi_points.radius_query(stop.lat, stop.lon, cfg.poi_buffer_m)) {
          nearby.insert(idx);
        }
      }
      std::map<std::string, long long> counts;
      for (size_t idx : nearby) counts[ds.pois[idx].category] += 1;
      double total = 0.0;
      for (const auto& [cat, c] : counts) {
        (void)cat;
        total += static_cast<double>(c);
      }
      double h = 0.0;
      for (const auto& [cat, c] : counts) {
        (void)cat;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
      }
      f.amenity_entropy = total > 0.0 ? h : 0.0;
    }
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

double feature_value(const RouteFeatures& f, const std::string& name) {
  if (name == "ridership") return static_cast<double>(f.ridership);
  if (name == "density") return f.density_contrib;
  if (name == "avg_betweenness") return f.avg_betweenness;
  if (name == "avg_path_length") return f.avg_path_length_delta;
  if (name == "sparse_station_ratio") return f.sparse_station_ratio;
  if (name == "amenity_entropy") return f.amenity_entropy;
  throw ValidationError("unknown feature '" + name + "' in coefficients");
}

}  // namespace

std::vector<FeatureScore> score_routes(const std::vector<RouteFeatures>& features,
                                       const std::string& dimension,
                                       const std::map<std::string, double>& weights,
                                       std::vector<std::string>* warnings) {
  if (features.empty()) return {};
  std::vector<FeatureScore> out(features.size());
  for (size_t i = 0; i < features.size(); ++i) {
    out[i].route_id = features[i].route_id;
    out[i].dimension = dimension;
  }

  for (const auto& [name, weight] : weights) {
    std::vector<double> raw(features.size());
    for (size_t i = 0; i < features.size(); ++i) {
      raw[i] = feature_value(features[i], name);
    }
    const double sd = stats::stddev(raw, 0);
    if (!(sd > 0.0)) {
      if (warnings != nullptr) {
        warnings->push_back("feature '" + name + "' has zero variance across " +
                            dimension + " scoring; contribution set to 0");
      }
      continue;
    }
    const double m = stats::mean(raw);
    for (size_t i = 0; i < features.size(); ++i) {
      out[i].score += weight * (raw[i] - m) / sd;
    }
  }

  std::vector<size_t> order(out.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (out[a].score != out[b].score) return out[a].score < out[b].score;
    return out[a].route_id < out[b].route_id;
  });
  for (size_t pos = 0; pos < order.size(); ++pos) {
    out[order[pos]].rank = static_cast<int>(pos) + 1;
  }
  return out;
}

void write_features_csv(const std::string& path,
                        const std::vector<RouteFeatures>& features,
                        const std::string& meta_comment) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  if (!meta_comment.empty()) f << "# " << meta_comment << '\n';
  f << "route_id,ridership,density,avg_betweenness,avg_path_length,"
       "sparse_station_ratio,amenity_entropy\n";
  for (const RouteFeatures& r : features) {
    f << r.route_id << ',' << r.ridership << ','
      << csv::format_double(r.density_contrib) << ','
      << csv::format_double(r.avg_betweenness) << ','
      << csv::format_double(r.avg_path_length_delta) << ','
      << csv::format_double(r.sparse_station_ratio) << ','
      << csv::format_double(r.amenity_entropy) << '\n';
  }
}

void write_scores_csv(const std::string& path,
                      const std::vector<FeatureScore>& scores,
                      const std::string& meta_comment) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  if (!meta_comment.empty()) f << "# " << meta_comment << '\n';
  f << "route_id,dimension,score,rank\n";
  for (const FeatureScore& s : scores) {
    f << s.route_id << ',' << s.dimension << ',' << csv::format_double(s.score)
      << ',' << s.rank << '\n';
  }
}

}  // namespace busim::feat
