#include "busim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "busim/geo.hpp"
#include "busim/rng.hpp"

namespace busim::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string padded_id(char prefix, int value, int width) {
  std::string digits = std::to_string(value);
  std::string out(1, prefix);
  out.append(width > static_cast<int>(digits.size())
                 ? static_cast<size_t>(width) - digits.size()
                 : 0,
             '0');
  out += digits;
  return out;
}

int id_width(int count) {
  int w = 1;
  for (int v = count > 0 ? count - 1 : 0; v >= 10; v /= 10) ++w;
  return w;
}

struct Frame {
  double lat0, lon0, m_per_deg_lat, m_per_deg_lon;
  Stop place(std::string id, double x_m, double y_m) const {
    return Stop{std::move(id), lat0 + y_m / m_per_deg_lat,
                lon0 + x_m / m_per_deg_lon};
  }
};

Frame make_frame(const SynthSpec& spec) {
  const double m_per_deg = 2.0 * kPi * geo::kEarthRadiusM / 360.0;
  return Frame{spec.center_lat, spec.center_lon, m_per_deg,
               m_per_deg * std::cos(spec.center_lat * kPi / 180.0)};
}

std::array<long long, kGroupCount> largest_remainder_counts(
    const std::array<double, 4>& mix, long long total) {
  double sum = 0.0;
  for (double m : mix) {
    if (m < 0.0 || !std::isfinite(m)) {
      throw ValidationError("group mix shares must be finite and non-negative");
    }
    sum += m;
  }
  if (sum <= 0.0) throw ValidationError("group mix shares sum to zero");

  std::array<long long, kGroupCount> counts{};
  std::array<double, kGroupCount> frac{};
  long long assigned = 0;
  for (size_t g = 0; g < kGroupCount; ++g) {
    const double exact = mix[g] / sum * static_cast<double>(total);
    counts[g] = static_cast<long long>(std::floor(exact));
    frac[g] = exact - static_cast<double>(counts[g]);
    assigned += counts[g];
  }
  std::array<size_t, kGroupCount> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return frac[a] > frac[b]; });
  for (long long k = 0; k < total - assigned; ++k) {
    counts[order[static_cast<size_t>(k) % kGroupCount]] += 1;
  }
  return counts;
}

void fill_route_meta(RouteDef& r, Rng& rng) {
  r.headway_min = rng.uniform01() < 0.5 ? 15.0 : 30.0;
  r.capacity = 60;
  static constexpr double kSpeeds[4] = {18.0, 20.0, 24.0, 30.0};
  r.v_off_kmh = kSpeeds[rng.uniform_int(0, 3)];
  r.first_departure_min = 360.0;
}

// stops on a rows x cols lattice (last row possibly partial); routes
// alternate full rows and full columns until the requested count
void build_grid(const SynthSpec& spec, const Frame& frame, Dataset& ds,
                Rng& rng) {
  const int n = spec.n_stops;
  int rows = std::max(2, static_cast<int>(std::floor(std::sqrt(n))));
  int cols = (n + rows - 1) / rows;
  const int sw = id_width(n);

  auto stop_at = [&](int r, int c) { return r * cols + c; };
  auto exists = [&](int r, int c) { return stop_at(r, c) < n; };

  for (int i = 0; i < n; ++i) {
    const int r = i / cols, c = i % cols;
    ds.stops.push_back(frame.place(
        padded_id('S', i, sw),
        (c - (cols - 1) / 2.0) * spec.spacing_m,
        -(r - (rows - 1) / 2.0) * spec.spacing_m));
  }

  std::vector<std::vector<int>> candidates;
  const int full_rows = n / cols;
  const int tail = n % cols;
  for (int k = 0; k < std::max(rows, cols); ++k) {
    if (k < rows) {
      std::vector<int> line;
      for (int c = 0; c < cols && exists(k, c); ++c) line.push_back(stop_at(k, c));
      if (line.size() >= 2) candidates.push_back(std::move(line));
    }
    if (k < cols) {
      std::vector<int> line;
      const int depth = full_rows + (k < tail ? 1 : 0);
      for (int r = 0; r < depth; ++r) line.push_back(stop_at(r, k));
      if (line.size() >= 2) candidates.push_back(std::move(line));
    }
  }
  if (spec.n_routes > static_cast<int>(candidates.size())) {
    throw ValidationError(
        "grid with " + std::to_string(n) + " stops supports at most " +
        std::to_string(candidates.size()) + " routes; " +
        std::to_string(spec.n_routes) + " requested");
  }

  const int rw = id_width(spec.n_routes);
  for (int k = 0; k < spec.n_routes; ++k) {
    RouteDef r;
    r.id = padded_id('R', k, rw);
    for (int s : candidates[k]) r.stop_ids.push_back(ds.stops[s].id);
    fill_route_meta(r, rng);
    ds.routes.push_back(std::move(r));
  }
}

struct HubLayout {
  std::vector<int> corridor;             // stop indexes along the trunk
  std::vector<std::vector<int>> spokes;  // outer stops only, inner to tip
};

// trunk corridor through the center, spokes branching off distinct corridor
// stops (alternating north/south), and an open ring chaining the spoke tips
HubLayout build_hub_spoke(const SynthSpec& spec, const Frame& frame,
                          Dataset& ds, Rng& rng) {
  if (spec.n_routes < 2) {
    throw ValidationError("hub_spoke topology needs at least 2 routes");
  }
  const bool with_ring = spec.n_routes >= 4;
  const int n_spokes = spec.n_routes - 1 - (with_ring ? 1 : 0);
  const int m_corridor = std::max(2, n_spokes);
  const int outer = spec.n_stops - m_corridor;
  if (outer < n_spokes) {
    throw ValidationError(
        "hub_spoke with " + std::to_string(spec.n_routes) + " routes needs at least " +
        std::to_string(m_corridor + n_spokes) + " stops; " +
        std::to_string(spec.n_stops) + " given");
  }

  HubLayout lay;
  const int sw = id_width(spec.n_stops);
  int next_stop = 0;
  auto add_stop = [&](double x, double y) {
    ds.stops.push_back(frame.place(padded_id('S', next_stop, sw), x, y));
    return next_stop++;
  };

  for (int i = 0; i < m_corridor; ++i) {
    lay.corridor.push_back(
        add_stop((i - (m_corridor - 1) / 2.0) * spec.spacing_m, 0.0));
  }

  // spoke stop counts by largest remainder over the leftover budget
  std::vector<int> depth(n_spokes, outer / n_spokes);
  for (int i = 0; i < outer % n_spokes; ++i) depth[i] += 1;

  lay.spokes.resize(n_spokes);
  for (int i = 0; i < n_spokes; ++i) {
    const double dir = i % 2 == 0 ? 1.0 : -1.0;
    const double x = (i - (m_corridor - 1) / 2.0) * spec.spacing_m;
    for (int j = 1; j <= depth[i]; ++j) {
      lay.spokes[i].push_back(add_stop(x, dir * j * spec.spacing_m));
    }
  }

  const int rw = id_width(spec.n_routes);
  int next_route = 0;
  auto add_route = [&](const std::vector<int>& stop_idx) {
    RouteDef r;
    r.id = padded_id('R', next_route++, rw);
    for (int s : stop_idx) r.stop_ids.push_back(ds.stops[s].id);
    fill_route_meta(r, rng);
    ds.routes.push_back(std::move(r));
  };

  add_route(lay.corridor);
  for (int i = 0; i < n_spokes; ++i) {
    std::vector<int> line{lay.corridor[i]};
    line.insert(line.end(), lay.spokes[i].begin(), lay.spokes[i].end());
    add_route(line);
  }
  if (with_ring) {
    // horseshoe through the tips: north tips west to east, south tips back
    std::vector<int> ring;
    for (int i = 0; i < n_spokes; i += 2) ring.push_back(lay.spokes[i].back());
    int odd = n_spokes - 1;
    if (odd % 2 == 0) --odd;  // largest odd spoke index
    for (int i = odd; i >= 1; i -= 2) ring.push_back(lay.spokes[i].back());
    add_route(ring);
  }
  return lay;
}

double draw_departure(const SynthSpec& spec, Rng& rng) {
  if (rng.uniform01() < spec.peak_concentration) {
    return rng.uniform01() < 0.55 ? rng.uniform_int(420, 539)
                                  : rng.uniform_int(1020, 1079);
  }
  return rng.uniform_int(360, 1259);
}

}  // namespace

Topology topology_from_string(const std::string& s) {
  if (s == "grid") return Topology::Grid;
  if (s == "hub_spoke") return Topology::HubSpoke;
  throw ValidationError("unknown topology '" + s + "' (expected grid or hub_spoke)");
}

Dataset generate_synthetic(const SynthSpec& spec, uint64_t seed) {
  if (spec.n_stops < 4) throw ValidationError("need at least 4 stops");
  if (spec.n_routes < 1) throw ValidationError("need at least 1 route");
  if (spec.n_trips < 0) throw ValidationError("trip count must be non-negative");

  Dataset ds;
  const Frame frame = make_frame(spec);
  Rng rng_net(Rng::derive(seed, 1));
  Rng rng_demand(Rng::derive(seed, 2));
  Rng rng_poi(Rng::derive(seed, 3));

  HubLayout hub;
  if (spec.topology == Topology::Grid) {
    build_grid(spec, frame, ds, rng_net);
  } else {
    hub = build_hub_spoke(spec, frame, ds, rng_net);
  }

  // demand: exact per-group counts, shuffled so groups interleave in time
  const auto counts = largest_remainder_counts(spec.group_mix, spec.n_trips);
  std::vector<Group> assignment;
  assignment.reserve(spec.n_trips);
  for (size_t g = 0; g < kGroupCount; ++g) {
    assignment.insert(assignment.end(), counts[g], kAllGroups[g]);
  }
  for (size_t i = assignment.size(); i > 1; --i) {
    std::swap(assignment[i - 1],
              assignment[rng_demand.uniform_int(0, static_cast<int>(i) - 1)]);
  }

  // OD candidates: direct pairs along one route, plus cross-route pairs
  // among served stops (reachable through shared stops or short transfers)
  std::vector<int> served;
  {
    std::map<std::string, int> by_id;
    for (size_t i = 0; i < ds.stops.size(); ++i) {
      by_id.emplace(ds.stops[i].id, static_cast<int>(i));
    }
    std::vector<char> mask(ds.stops.size(), 0);
    for (const RouteDef& r : ds.routes) {
      for (const std::string& sid : r.stop_ids) mask[by_id.at(sid)] = 1;
    }
    for (size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) served.push_back(static_cast<int>(i));
    }
  }

  const int pw = id_width(spec.n_trips);
  for (int i = 0; i < spec.n_trips; ++i) {
    TripRecord t;
    t.passenger_id = padded_id('P', i, pw);
    t.group = assignment[i];
    t.departure_min = draw_departure(spec, rng_demand);

    if (spec.topology == Topology::HubSpoke && hub.spokes.size() >= 2 &&
        rng_demand.uniform01() < 0.7) {
      // cross-spoke pair: forces a trunk (or ring) connection
      const int a = rng_demand.uniform_int(0, static_cast<int>(hub.spokes.size()) - 1);
      int b = rng_demand.uniform_int(0, static_cast<int>(hub.spokes.size()) - 2);
      if (b >= a) ++b;
      const auto& sa = hub.spokes[a];
      const auto& sb = hub.spokes[b];
      t.origin_stop = ds.stops[sa[rng_demand.uniform_int(0, static_cast<int>(sa.size()) - 1)]].id;
      t.dest_stop = ds.stops[sb[rng_demand.uniform_int(0, static_cast<int>(sb.size()) - 1)]].id;
    } else if (rng_demand.uniform01() < 0.6) {
      const RouteDef& r = ds.routes[rng_demand.uniform_int(
          0, static_cast<int>(ds.routes.size()) - 1)];
      const int na = static_cast<int>(r.stop_ids.size());
      const int p = rng_demand.uniform_int(0, na - 1);
      int q = rng_demand.uniform_int(0, na - 2);
      if (q >= p) ++q;
      t.origin_stop = r.stop_ids[p];
      t.dest_stop = r.stop_ids[q];
    } else {
      const int p = rng_demand.uniform_int(0, static_cast<int>(served.size()) - 1);
      int q = rng_demand.uniform_int(0, static_cast<int>(served.size()) - 2);
      if (q >= p) ++q;
      t.origin_stop = ds.stops[served[p]].id;
      t.dest_stop = ds.stops[served[q]].id;
    }
    ds.trips.push_back(std::move(t));
  }

  // amenities scattered around stops, within the default stop buffer
  static const char* kCategories[6] = {"retail", "school",      "clinic",
                                       "park",   "office", "residential"};
  const int n_pois = spec.n_pois >= 0 ? spec.n_pois : 2 * spec.n_stops;
  const int aw = id_width(n_pois);
  for (int i = 0; i < n_pois; ++i) {
    const Stop& anchor =
        ds.stops[rng_poi.uniform_int(0, static_cast<int>(ds.stops.size()) - 1)];
    const double radius = rng_poi.uniform(0.0, 250.0);
    const double angle = rng_poi.uniform(0.0, 2.0 * kPi);
    PoiRecord p;
    p.id = padded_id('A', i, aw);
    p.category = kCategories[rng_poi.uniform_int(0, 5)];
    p.lat = anchor.lat + radius * std::sin(angle) / frame.m_per_deg_lat;
    p.lon = anchor.lon + radius * std::cos(angle) / frame.m_per_deg_lon;
    ds.pois.push_back(std::move(p));
  }

  ds.rebuild_indices();
  return ds;
}

}  // namespace busim::synth
