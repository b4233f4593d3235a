#include "busim/geo.hpp"

#include <algorithm>
#include <cmath>

#include "busim/kernels.hpp"

namespace busim::geo {
namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Threshold padding in meters for the dot-product prefilter. Generous against
// rounding; the exact haversine check discards false positives.
constexpr double kPadM = 0.5;

}  // namespace

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * kDegToRad;
  const double p2 = lat2 * kDegToRad;
  const double dp = (lat2 - lat1) * kDegToRad;
  const double dl = (lon2 - lon1) * kDegToRad;
  const double sp = std::sin(dp / 2.0);
  const double sl = std::sin(dl / 2.0);
  const double a = sp * sp + std::cos(p1) * std::cos(p2) * sl * sl;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

void PointSet::add(double lat_deg, double lon_deg) {
  const double p = lat_deg * kDegToRad;
  const double l = lon_deg * kDegToRad;
  x_.push_back(std::cos(p) * std::cos(l));
  y_.push_back(std::cos(p) * std::sin(l));
  z_.push_back(std::sin(p));
  lat_.push_back(lat_deg);
  lon_.push_back(lon_deg);
}

std::vector<uint32_t> PointSet::radius_query(double qlat, double qlon,
                                             double radius_m, size_t begin,
                                             size_t end) const {
  std::vector<uint32_t> out;
  if (begin >= end) return out;
  const double p = qlat * kDegToRad;
  const double l = qlon * kDegToRad;
  const double ux = std::cos(p) * std::cos(l);
  const double uy = std::cos(p) * std::sin(l);
  const double uz = std::sin(p);
  const double min_dot = std::cos((radius_m + kPadM) / kEarthRadiusM);

  const size_t n = end - begin;
  std::vector<uint32_t> cand(n);
  const size_t cnt = kernels::active().dot_select_ge(
      x_.data() + begin, y_.data() + begin, z_.data() + begin, n, ux, uy, uz,
      min_dot, cand.data());
  out.reserve(cnt);
  for (size_t k = 0; k < cnt; ++k) {
    const size_t j = begin + cand[k];
    if (haversine_m(qlat, qlon, lat_[j], lon_[j]) <= radius_m) {
      out.push_back(static_cast<uint32_t>(j));
    }
  }
  return out;
}

std::vector<std::pair<uint32_t, uint32_t>> PointSet::all_pairs_within(
    double radius_m) const {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  const size_t n = size();
  for (size_t i = 0; i + 1 < n; ++i) {
    for (uint32_t j : radius_query(lat_[i], lon_[i], radius_m, i + 1, n)) {
      out.emplace_back(static_cast<uint32_t>(i), j);
    }
  }
  return out;
}

}  // namespace busim::geo
