#include "busim/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace busim {

const std::string& group_name(Group g) {
  static const std::array<std::string, kGroupCount> names = {
      "General", "Student", "Elderly", "Disabled"};
  return names[static_cast<size_t>(g)];
}

Group group_from_string(const std::string& s) {
  for (Group g : kAllGroups) {
    if (group_name(g) == s) return g;
  }
  throw std::invalid_argument("unknown group '" + s + "'");
}

SensitivitySet default_sensitivity() {
  SensitivitySet s;
  s.of(Group::General) = {0.307, 0.391, 0.327, 0.393};
  s.of(Group::Student) = {0.281, 0.388, 0.282, 0.302};
  s.of(Group::Elderly) = {0.407, 0.502, 0.697, 0.750};
  s.of(Group::Disabled) = {0.444, 0.563, 0.697, 0.753};
  return s;
}

void Dataset::rebuild_indices() {
  stop_index.clear();
  route_index.clear();
  route_stops.clear();
  for (size_t i = 0; i < stops.size(); ++i) {
    if (!stop_index.emplace(stops[i].id, static_cast<int>(i)).second) {
      throw ValidationError("duplicate stop_id " + stops[i].id);
    }
  }
  for (size_t i = 0; i < routes.size(); ++i) {
    if (!route_index.emplace(routes[i].id, static_cast<int>(i)).second) {
      throw ValidationError("duplicate route_id " + routes[i].id);
    }
  }
  route_stops.reserve(routes.size());
  for (const RouteDef& r : routes) {
    if (r.stop_ids.size() < 2) {
      throw ValidationError("route " + r.id + " has fewer than 2 stops");
    }
    std::vector<int> seq;
    seq.reserve(r.stop_ids.size());
    for (const std::string& sid : r.stop_ids) {
      auto it = stop_index.find(sid);
      if (it == stop_index.end()) {
        throw ValidationError("route " + r.id + " references unknown stop " + sid);
      }
      if (!seq.empty() && seq.back() == it->second) {
        throw ValidationError("route " + r.id + " repeats stop " + sid +
                              " consecutively");
      }
      seq.push_back(it->second);
    }
    route_stops.push_back(std::move(seq));
  }
}

}  // namespace busim

namespace busim::io {
namespace {

std::vector<std::string> split_pipe(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == '|') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail_row(const csv::Table& t, size_t row, const std::string& msg) {
  std::ostringstream os;
  os << t.name << ":" << t.line_of_row[row] << ": " << msg;
  throw ValidationError(os.str());
}

void check_lat_lon(const csv::Table& t, size_t row, double lat, double lon) {
  if (lat < -90.0 || lat > 90.0) fail_row(t, row, "latitude out of range");
  if (lon < -180.0 || lon > 180.0) fail_row(t, row, "longitude out of range");
}

}  // namespace

Dataset dataset_from_tables(const csv::Table& stops, const csv::Table& routes,
                            const csv::Table& trips, const csv::Table* pois) {
  Dataset ds;

  {
    const int c_id = stops.require_column("stop_id");
    const int c_lat = stops.require_column("lat");
    const int c_lon = stops.require_column("lon");
    for (size_t r = 0; r < stops.rows.size(); ++r) {
      Stop s;
      s.id = stops.cell(r, c_id);
      if (s.id.empty()) fail_row(stops, r, "empty stop_id");
      s.lat = stops.number(r, c_lat);
      s.lon = stops.number(r, c_lon);
      check_lat_lon(stops, r, s.lat, s.lon);
      ds.stops.push_back(std::move(s));
    }
  }

  {
    const int c_id = routes.require_column("route_id");
    const int c_seq = routes.require_column("stop_sequence");
    const int c_head = routes.require_column("headway_min");
    const int c_cap = routes.require_column("capacity");
    const int c_voff = routes.require_column("v_off_kmh");
    const int c_dep = routes.require_column("first_departure_min");
    for (size_t r = 0; r < routes.rows.size(); ++r) {
      RouteDef rd;
      rd.id = routes.cell(r, c_id);
      if (rd.id.empty()) fail_row(routes, r, "empty route_id");
      rd.stop_ids = split_pipe(routes.cell(r, c_seq));
      if (rd.stop_ids.size() < 2) {
        fail_row(routes, r, "route " + rd.id + " has fewer than 2 stops");
      }
      for (size_t i = 1; i < rd.stop_ids.size(); ++i) {
        if (rd.stop_ids[i] == rd.stop_ids[i - 1]) {
          fail_row(routes, r, "route " + rd.id + " repeats stop " + rd.stop_ids[i] +
                                  " consecutively");
        }
      }
      rd.headway_min = routes.number(r, c_head);
      if (!(rd.headway_min > 0.0)) fail_row(routes, r, "headway_min must be > 0");
      rd.capacity = static_cast<int>(routes.integer(r, c_cap));
      if (rd.capacity < 1) fail_row(routes, r, "capacity must be >= 1");
      rd.v_off_kmh = routes.number(r, c_voff);
      if (!(rd.v_off_kmh > 0.0)) fail_row(routes, r, "v_off_kmh must be > 0");
      rd.first_departure_min = routes.number(r, c_dep);
      if (rd.first_departure_min < 0.0) {
        fail_row(routes, r, "first_departure_min must be >= 0");
      }
      ds.routes.push_back(std::move(rd));
    }
  }

  {
    const int c_id = trips.require_column("passenger_id");
    const int c_grp = trips.require_column("group");
    const int c_o = trips.require_column("origin_stop");
    const int c_d = trips.require_column("dest_stop");
    const int c_dep = trips.require_column("departure_min");
    std::set<std::string> seen;
    for (size_t r = 0; r < trips.rows.size(); ++r) {
      TripRecord tr;
      tr.passenger_id = trips.cell(r, c_id);
      if (tr.passenger_id.empty()) fail_row(trips, r, "empty passenger_id");
      if (!seen.insert(tr.passenger_id).second) {
        fail_row(trips, r, "duplicate passenger_id " + tr.passenger_id);
      }
      try {
        tr.group = group_from_string(trips.cell(r, c_grp));
      } catch (const std::invalid_argument& e) {
        fail_row(trips, r, e.what());
      }
      tr.origin_stop = trips.cell(r, c_o);
      tr.dest_stop = trips.cell(r, c_d);
      if (tr.origin_stop == tr.dest_stop) {
        fail_row(trips, r, "trip " + tr.passenger_id + " has origin == destination");
      }
      tr.departure_min = trips.number(r, c_dep);
      if (tr.departure_min < 0.0) fail_row(trips, r, "departure_min must be >= 0");
      ds.trips.push_back(std::move(tr));
    }
  }

  if (pois != nullptr) {
    const int c_id = pois->require_column("poi_id");
    const int c_lat = pois->require_column("lat");
    const int c_lon = pois->require_column("lon");
    const int c_cat = pois->require_column("category");
    std::set<std::string> seen;
    for (size_t r = 0; r < pois->rows.size(); ++r) {
      PoiRecord p;
      p.id = pois->cell(r, c_id);
      if (p.id.empty()) fail_row(*pois, r, "empty poi_id");
      if (!seen.insert(p.id).second) fail_row(*pois, r, "duplicate poi_id " + p.id);
      p.lat = pois->number(r, c_lat);
      p.lon = pois->number(r, c_lon);
      check_lat_lon(*pois, r, p.lat, p.lon);
      p.category = pois->cell(r, c_cat);
      if (p.category.empty()) fail_row(*pois, r, "empty category");
      ds.pois.push_back(std::move(p));
    }
  }

  ds.rebuild_indices();  // also verifies unique ids and stop references

  // trips reference resolved stops
  for (const TripRecord& tr : ds.trips) {
    if (!ds.stop_index.count(tr.origin_stop)) {
      throw ValidationError("trip " + tr.passenger_id + " references unknown stop " +
                            tr.origin_stop);
    }
    if (!ds.stop_index.count(tr.dest_stop)) {
      throw ValidationError("trip " + tr.passenger_id + " references unknown stop " +
                            tr.dest_stop);
    }
  }
  return ds;
}

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const csv::Table stops = csv::read_file((fs::path(dir) / "stops.csv").string());
  const csv::Table routes = csv::read_file((fs::path(dir) / "routes.csv").string());
  const csv::Table trips = csv::read_file((fs::path(dir) / "trips.csv").string());
  const fs::path poi_path = fs::path(dir) / "pois.csv";
  if (fs::exists(poi_path)) {
    const csv::Table pois = csv::read_file(poi_path.string());
    return dataset_from_tables(stops, routes, trips, &pois);
  }
  return dataset_from_tables(stops, routes, trips, nullptr);
}

void write_dataset(const Dataset& ds, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "stops.csv", std::ios::binary);
    out << "stop_id,lat,lon\n";
    for (const Stop& s : ds.stops) {
      out << s.id << ',' << csv::format_double(s.lat) << ','
          << csv::format_double(s.lon) << '\n';
    }
  }
  {
    std::ofstream out(fs::path(dir) / "routes.csv", std::ios::binary);
    out << "route_id,stop_sequence,headway_min,capacity,v_off_kmh,first_departure_min\n";
    for (const RouteDef& r : ds.routes) {
      out << r.id << ',';
      for (size_t i = 0; i < r.stop_ids.size(); ++i) {
        if (i > 0) out << '|';
        out << r.stop_ids[i];
      }
      out << ',' << csv::format_double(r.headway_min) << ',' << r.capacity << ','
          << csv::format_double(r.v_off_kmh) << ','
          << csv::format_double(r.first_departure_min) << '\n';
    }
  }
  {
    std::ofstream out(fs::path(dir) / "trips.csv", std::ios::binary);
    out << "passenger_id,group,origin_stop,dest_stop,departure_min\n";
    for (const TripRecord& t : ds.trips) {
      out << t.passenger_id << ',' << group_name(t.group) << ',' << t.origin_stop
          << ',' << t.dest_stop << ',' << csv::format_double(t.departure_min)
          << '\n';
    }
  }
  if (!ds.pois.empty()) {
    std::ofstream out(fs::path(dir) / "pois.csv", std::ios::binary);
    out << "poi_id,lat,lon,category\n";
    for (const PoiRecord& p : ds.pois) {
      out << p.id << ',' << csv::format_double(p.lat) << ','
          << csv::format_double(p.lon) << ',' << p.category << '\n';
    }
  }
}

}  // namespace busim::io
