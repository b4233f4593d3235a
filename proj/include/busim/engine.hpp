#pragma once

#include <array>
#include <vector>

#include "busim/network.hpp"
#include "busim/planner.hpp"
#include "busim/types.hpp"

namespace busim::sim {

enum class TripStatus { Completed, FailedNoPlan, FailedHorizon };

const char* trip_status_name(TripStatus s);

// L counts steps spent onboard (the step-sized travel segments of the ride,
// which makes L a travel-time proxy), T counts boardings minus one, W counts
// full steps spent waiting at a stop, C counts onboard steps in a bus at or
// above the crowding threshold. Failed trips carry no D.
struct TripOutcome {
  TripStatus status = TripStatus::FailedNoPlan;
  int l = 0, t = 0, w = 0, c = 0;
  double d = 0.0;  // valid only when status == Completed
  double in_vehicle_min = 0.0, waiting_min = 0.0, crowded_min = 0.0;
  int spawn_step = -1;
  // per executed leg: (ready step, board step, alight step); used by the
  // replay checks in the tests
  std::vector<std::array<int, 3>> leg_steps;
};

struct GroupAggregate {
  long long n_total = 0;
  long long n_completed = 0;
  long long n_failed = 0;
  double failure_rate = 0.0;
  // means over completed trips
  double mean_d = 0.0;
  double mean_in_vehicle_min = 0.0;
  double mean_transfers = 0.0;
  double mean_waiting_min = 0.0;
  double mean_crowded_min = 0.0;
  // mean raw accumulators (steps / counts) over completed trips
  double mean_l = 0.0, mean_t = 0.0, mean_w = 0.0, mean_c = 0.0;
};

struct SimResult {
  std::vector<TripOutcome> outcomes;  // aligned with ds.trips
  std::array<GroupAggregate, kGroupCount> by_group{};
  GroupAggregate overall;
  double mean_load_ratio = 0.0;  // mean over (active bus, step) samples
  long long buses_dispatched = 0;
  int steps_simulated = 0;
};

double compute_dissatisfaction(const SensitivityProfile& w, double l, double t,
                               double wait, double c);

// Synchronous-step simulation: per step buses are dispatched on their
// headways, advance along the polyline by speed * step, and stop crossings
// are serviced in within-step time order (alight, turn at terminals, then
// board FIFO by arrival step and passenger id, capacity permitting).
// Passengers follow their planned legs; transfer walks happen within the
// step. Deterministic for fixed inputs.
SimResult run_simulation(const net::Network& net, const Dataset& ds,
                         const std::vector<plan::TripPlan>& plans,
                         const SensitivitySet& sens, const SimConfig& cfg);

}  // namespace busim::sim
