#pragma once

#include <array>
#include <cstdint>

#include "busim/types.hpp"

namespace busim::synth {

enum class Topology { Grid, HubSpoke };

// Synthetic network + demand generator. Deterministic and portable for a
// fixed seed (all randomness flows through busim::Rng's portable mappings).
struct SynthSpec {
  Topology topology = Topology::Grid;
  int n_routes = 10;
  int n_stops = 40;
  int n_trips = 2000;
  // General, Student, Elderly, Disabled shares; normalized, realized by
  // largest remainder so realized counts match within one trip per group.
  std::array<double, 4> group_mix{0.30, 0.15, 0.40, 0.15};
  // probability a departure is drawn from the morning (7-9) or evening
  // (17-18) peak window instead of the flat service day
  double peak_concentration = 0.6;
  double spacing_m = 600.0;
  double center_lat = 40.32;
  double center_lon = 116.63;
  int n_pois = -1;  // -1 means 2 * n_stops
};

Topology topology_from_string(const std::string& s);

Dataset generate_synthetic(const SynthSpec& spec, uint64_t seed);

}  // namespace busim::synth
