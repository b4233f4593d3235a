#include "busim/config_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "busim/csv.hpp"

namespace busim::cfgio {

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError(path + ": cannot open");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f << j.dump(2) << '\n';
}

double need_number(const nlohmann::json& j, const std::string& key,
                   const std::string& context) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ValidationError(context + ": missing numeric field '" + key + "'");
  }
  return j[key].get<double>();
}

}  // namespace

SensitivitySet load_sensitivity(const std::string& path) {
  const nlohmann::json j = read_json(path);
  if (!j.contains("groups") || !j["groups"].is_object()) {
    throw ValidationError(path + ": expected top-level object 'groups'");
  }
  SensitivitySet s;
  for (Group g : kAllGroups) {
    const std::string name = group_name(g);
    if (!j["groups"].contains(name)) {
      throw ValidationError(path + ": missing group '" + name + "'");
    }
    const nlohmann::json& row = j["groups"][name];
    SensitivityProfile p;
    p.travel = need_number(row, "beta_L", path + " " + name);
    p.transfer = need_number(row, "beta_T", path + " " + name);
    p.waiting = need_number(row, "beta_W", path + " " + name);
    p.crowding = need_number(row, "beta_C", path + " " + name);
    for (double v : {p.travel, p.transfer, p.waiting, p.crowding}) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError(path + ": " + name +
                              " weights must be finite and non-negative");
      }
    }
    s.by_group[static_cast<size_t>(g)] = p;
  }
  return s;
}

void write_sensitivity(const std::string& path, const SensitivitySet& s) {
  nlohmann::json groups;
  for (Group g : kAllGroups) {
    const SensitivityProfile& p = s.of(g);
    groups[group_name(g)] = {{"beta_L", p.travel},
                             {"beta_T", p.transfer},
                             {"beta_W", p.waiting},
                             {"beta_C", p.crowding}};
  }
  write_json(path, nlohmann::json{{"groups", groups}});
}

feat::Coefficients load_coefficients(const std::string& path) {
  const nlohmann::json j = read_json(path);
  if (!j.is_object() || j.empty()) {
    throw ValidationError(path + ": expected {dimension: {feature: weight}}");
  }
  feat::Coefficients c;
  for (const auto& [dim, feats] : j.items()) {
    if (!feats.is_object()) {
      throw ValidationError(path + ": dimension '" + dim +
                            "' must map features to weights");
    }
    for (const auto& [name, w] : feats.items()) {
      if (!w.is_number()) {
        throw ValidationError(path + ": weight for '" + dim + "." + name +
                              "' must be a number");
      }
      c[dim][name] = w.get<double>();
    }
  }
  return c;
}

void write_coefficients(const std::string& path, const feat::Coefficients& c) {
  nlohmann::json j;
  for (const auto& [dim, feats] : c) {
    for (const auto& [name, w] : feats) j[dim][name] = w;
  }
  write_json(path, j);
}

namespace {

void apply_key(SimConfig& cfg, const std::string& key, const std::string& value,
               const std::string& where) {
  auto num = [&]() {
    try {
      size_t used = 0;
      const double v = std::stod(value, &used);
      while (used < value.size() &&
             (value[used] == ' ' || value[used] == '\t')) {
        ++used;
      }
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ValidationError(where + ": value '" + value + "' for '" + key +
                            "' is not a number");
    }
  };
  if (key == "step_min") {
    cfg.step_min = num();
  } else if (key == "transfer_radius_m") {
    cfg.transfer_radius_m = num();
  } else if (key == "crowding_threshold") {
    cfg.crowding_threshold = num();
  } else if (key == "sparse_distance_m") {
    cfg.sparse_distance_m = num();
  } else if (key == "poi_buffer_m") {
    cfg.poi_buffer_m = num();
  } else if (key == "horizon_min") {
    cfg.horizon_min = num();
  } else if (key == "transfer_cap") {
    cfg.transfer_cap = static_cast<int>(num());
  } else if (key == "rng_seed") {
    cfg.rng_seed = static_cast<uint64_t>(num());
  } else if (key == "fail_policy") {
    if (value != "exclude_from_mean_d") {
      throw ValidationError(where + ": unknown fail_policy '" + value + "'");
    }
    cfg.fail_policy = FailPolicy::ExcludeFromMeanD;
  } else if (key == "speed.t_morning_min") {
    cfg.speed.t_morning_min = num();
  } else if (key == "speed.t_evening_min") {
    cfg.speed.t_evening_min = num();
  } else if (key == "speed.sigma_min") {
    cfg.speed.sigma_min = num();
  } else if (key == "speed.k") {
    cfg.speed.k = num();
  } else if (key == "speed.v_min_kmh") {
    cfg.speed.v_min_kmh = num();
  } else {
    throw ValidationError(where + ": unknown config key '" + key + "'");
  }
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

void validate_config(const SimConfig& cfg, const std::string& where) {
  if (!(cfg.step_min > 0)) throw ValidationError(where + ": step_min must be > 0");
  if (!(cfg.transfer_radius_m >= 0)) {
    throw ValidationError(where + ": transfer_radius_m must be >= 0");
  }
  if (!(cfg.crowding_threshold > 0 && cfg.crowding_threshold <= 1)) {
    throw ValidationError(where + ": crowding_threshold must be in (0, 1]");
  }
  if (!(cfg.sparse_distance_m > 0) || !(cfg.poi_buffer_m > 0) ||
      !(cfg.horizon_min > 0)) {
    throw ValidationError(where + ": distance and horizon settings must be positive");
  }
  if (cfg.transfer_cap < 0) {
    throw ValidationError(where + ": transfer_cap must be >= 0");
  }
  if (!(cfg.speed.v_min_kmh > 0) || !(cfg.speed.sigma_min > 0) ||
      !(cfg.speed.k >= 0 && cfg.speed.k < 1) ||
      !(cfg.speed.t_morning_min < cfg.speed.t_evening_min)) {
    throw ValidationError(where + ": speed profile settings out of range");
  }
}

}  // namespace

SimConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError(path + ": cannot open");
  SimConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected key = value");
    }
    apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
              path + ":" + std::to_string(lineno));
  }
  validate_config(cfg, path);
  return cfg;
}

std::string dump_config(const SimConfig& cfg) {
  std::ostringstream out;
  auto kv = [&](const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  kv("step_min", csv::format_double(cfg.step_min));
  kv("transfer_radius_m", csv::format_double(cfg.transfer_radius_m));
  kv("crowding_threshold", csv::format_double(cfg.crowding_threshold));
  kv("sparse_distance_m", csv::format_double(cfg.sparse_distance_m));
  kv("poi_buffer_m", csv::format_double(cfg.poi_buffer_m));
  kv("horizon_min", csv::format_double(cfg.horizon_min));
  kv("transfer_cap", std::to_string(cfg.transfer_cap));
  kv("rng_seed", std::to_string(cfg.rng_seed));
  kv("fail_policy", "exclude_from_mean_d");
  kv("speed.t_morning_min", csv::format_double(cfg.speed.t_morning_min));
  kv("speed.t_evening_min", csv::format_double(cfg.speed.t_evening_min));
  kv("speed.sigma_min", csv::format_double(cfg.speed.sigma_min));
  kv("speed.k", csv::format_double(cfg.speed.k));
  kv("speed.v_min_kmh", csv::format_double(cfg.speed.v_min_kmh));
  return out.str();
}

}  // namespace busim::cfgio
