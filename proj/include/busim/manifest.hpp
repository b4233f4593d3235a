#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "busim/types.hpp"

namespace busim::mani {

inline constexpr const char* kToolVersion = "busim 1.0.0";

// Reproducibility record attached to every run: identical manifests (minus
// the timestamp, the only field allowed to vary) imply identical results.
struct RunManifest {
  std::string config_hash;
  uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;  // filename -> hex digest
  std::string tool_version = kToolVersion;
  std::string timestamp;  // ISO 8601 UTC
};

uint64_t fnv1a(const void* data, size_t n);
uint64_t fnv1a(const std::string& s);
std::string hex64(uint64_t v);

std::string file_digest(const std::string& path);

RunManifest make_manifest(const std::string& canonical_config, uint64_t seed,
                          const std::vector<std::string>& input_paths);

void write_manifest(const std::string& path, const RunManifest& m);

// "config_hash=... seed=..." line embedded as a comment in CSV outputs and
// as fields in JSON outputs
std::string meta_comment(const RunManifest& m);

}  // namespace busim::mani
