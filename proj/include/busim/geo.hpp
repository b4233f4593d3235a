#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace busim::geo {

inline constexpr double kEarthRadiusM = 6371000.0;

// Great-circle distance in meters.
double haversine_m(double lat1, double lon1, double lat2, double lon2);

// Points stored as unit vectors (structure of arrays) so radius queries can
// run through the batch dot-product kernel. The kernel is a prefilter with a
// padded threshold; haversine_m on the survivors makes the final call, so
// results are identical across kernel backends.
class PointSet {
 public:
  void add(double lat_deg, double lon_deg);
  size_t size() const { return lat_.size(); }
  double lat(size_t i) const { return lat_[i]; }
  double lon(size_t i) const { return lon_[i]; }

  // indices j in [begin, end) with haversine(q, point j) <= radius_m
  std::vector<uint32_t> radius_query(double qlat, double qlon, double radius_m,
                                     size_t begin, size_t end) const;
  std::vector<uint32_t> radius_query(double qlat, double qlon, double radius_m) const {
    return radius_query(qlat, qlon, radius_m, 0, size());
  }

  // unordered pairs (i, j), i < j, within radius_m of each other
  std::vector<std::pair<uint32_t, uint32_t>> all_pairs_within(double radius_m) const;

 private:
  std::vector<double> x_, y_, z_, lat_, lon_;
};

}  // namespace busim::geo
