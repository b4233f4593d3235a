#pragma once

#include <map>
#include <string>
#include <vector>

#include "busim/network.hpp"
#include "busim/planner.hpp"
#include "busim/types.hpp"

namespace busim::feat {

struct RouteFeatures {
  std::string route_id;
  long long ridership = 0;        // trips whose baseline plan rides the route
  double density_contrib = 0.0;   // density drop caused by removing the route
  double avg_betweenness = 0.0;   // mean betweenness over the route's stops
  double avg_path_length_delta = 0.0;  // APL(removed) - APL(current)
  double sparse_station_ratio = 0.0;
  double amenity_entropy = 0.0;
  bool pois_present = false;
};

struct FeatureScore {
  std::string route_id;
  std::string dimension;
  double score = 0.0;
  int rank = 0;  // 1 = lowest score = first candidate for removal
};

// dimension -> feature -> regression weight
using Coefficients = std::map<std::string, std::map<std::string, double>>;

// default weights for the three deletion dimensions
Coefficients default_coefficients();

const std::vector<std::string>& dimension_names();

std::vector<RouteFeatures> compute_route_features(
    const net::Network& network, const Dataset& ds,
    const std::vector<plan::TripPlan>& plans, const SimConfig& cfg);

// score = sum of weight * z-scored feature across active routes; ranks
// ascend with score, ties broken by route_id. Zero-variance features score
// 0 and add a warning.
std::vector<FeatureScore> score_routes(const std::vector<RouteFeatures>& features,
                                       const std::string& dimension,
                                       const std::map<std::string, double>& weights,
                                       std::vector<std::string>* warnings = nullptr);

void write_features_csv(const std::string& path,
                        const std::vector<RouteFeatures>& features,
                        const std::string& meta_comment);
void write_scores_csv(const std::string& path,
                      const std::vector<FeatureScore>& scores,
                      const std::string& meta_comment);

}  // namespace busim::feat
