#include "busim/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace busim::mani {

uint64_t fnv1a(const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 14695981039346656037ull;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::string hex64(uint64_t v) {
  char buf[17];
  snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError(path + ": cannot open for digest");
  std::ostringstream ss;
  ss << f.rdbuf();
  return hex64(fnv1a(ss.str()));
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
           tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
           tm.tm_sec);
  return std::string(buf);
}

std::string basename_of(const std::string& path) {
  const size_t pos = path.find_last_of('/');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

}  // namespace

RunManifest make_manifest(const std::string& canonical_config, uint64_t seed,
                          const std::vector<std::string>& input_paths) {
  RunManifest m;
  m.config_hash = hex64(fnv1a(canonical_config));
  m.seed = seed;
  for (const std::string& p : input_paths) {
    m.input_digests[basename_of(p)] = file_digest(p);
  }
  m.timestamp = utc_now();
  return m;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["input_digests"] = m.input_digests;
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f << j.dump(2) << '\n';
}

std::string meta_comment(const RunManifest& m) {
  return "config_hash=" + m.config_hash + " seed=" + std::to_string(m.seed);
}

}  // namespace busim::mani
