#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace busim {

enum class Group : uint8_t { General = 0, Student = 1, Elderly = 2, Disabled = 3 };

inline constexpr int kGroupCount = 4;
inline constexpr std::array<Group, kGroupCount> kAllGroups = {
    Group::General, Group::Student, Group::Elderly, Group::Disabled};

const std::string& group_name(Group g);
Group group_from_string(const std::string& s);  // throws std::invalid_argument

struct Stop {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
};

struct RouteDef {
  std::string id;
  std::vector<std::string> stop_ids;  // ordered, consecutive entries distinct
  double headway_min = 15.0;
  int capacity = 60;
  double v_off_kmh = 20.0;
  double first_departure_min = 0.0;
};

struct TripRecord {
  std::string passenger_id;
  Group group = Group::General;
  std::string origin_stop;
  std::string dest_stop;
  double departure_min = 0.0;  // minutes after midnight
};

struct PoiRecord {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
  std::string category;
};

// Per-group weights of the dissatisfaction index
//   D = travel * L + transfer * T + waiting * W + crowding * C.
struct SensitivityProfile {
  double travel = 0.0;
  double transfer = 0.0;
  double waiting = 0.0;
  double crowding = 0.0;
};

struct SensitivitySet {
  std::array<SensitivityProfile, kGroupCount> by_group{};

  const SensitivityProfile& of(Group g) const { return by_group[static_cast<size_t>(g)]; }
  SensitivityProfile& of(Group g) { return by_group[static_cast<size_t>(g)]; }
};

// Shipped default weights (see configs/sensitivity_default.json).
SensitivitySet default_sensitivity();

// Two-peak speed profile: speed dips around the morning and evening rush.
struct SpeedShape {
  double t_morning_min = 480.0;   // 08:00
  double t_evening_min = 1050.0;  // 17:30
  double sigma_min = 60.0;
  double k = 0.4;                 // peak slowdown fraction
  double v_min_kmh = 8.0;
};

enum class FailPolicy : uint8_t { ExcludeFromMeanD = 0 };

struct SimConfig {
  int step_min = 5;
  double transfer_radius_m = 300.0;
  double crowding_threshold = 0.8;   // load/capacity at or above => crowded
  double sparse_distance_m = 800.0;
  double poi_buffer_m = 300.0;
  double horizon_min = 1440.0;
  int transfer_cap = 3;              // max transfers per plan
  uint64_t rng_seed = 0;
  FailPolicy fail_policy = FailPolicy::ExcludeFromMeanD;
  SpeedShape speed;
};

struct Dataset {
  std::vector<Stop> stops;
  std::vector<RouteDef> routes;
  std::vector<TripRecord> trips;
  std::vector<PoiRecord> pois;

  std::map<std::string, int> stop_index;
  std::map<std::string, int> route_index;

  // per-route stop indices into `stops`, resolved at load time
  std::vector<std::vector<int>> route_stops;

  void rebuild_indices();  // throws ValidationError on dangling references
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace busim
