#pragma once

#include <vector>

#include "busim/network.hpp"
#include "busim/types.hpp"

namespace busim::plan {

struct Leg {
  int route = -1;        // index into Network::routes
  int board_stop = -1;   // stop index
  int alight_stop = -1;
  int board_dir = +1;    // +1 rides forward along the stop sequence, -1 reverse
  int ride_segments = 0; // planned ride edges (buses may flip at terminals)
};

struct TripPlan {
  bool feasible = false;
  std::vector<Leg> legs;
  double planned_cost = 0.0;
  int transfers() const {
    return legs.empty() ? 0 : static_cast<int>(legs.size()) - 1;
  }
  bool uses_inactive_route(const net::Network& net) const;
};

// Generalized-cost planner. Cost of a plan for group g:
//   w_travel * (total ride segments)
// + w_transfer * (boardings - 1)
// + w_waiting * sum over boardings of (headway/2) / step_min
// Crowding is not priced at planning time. At most cfg.transfer_cap transfers.
// Consecutive legs connect at the same stop or across one transfer edge; the
// first leg boards at the trip origin and the last leg alights at the
// destination. Ties break on (cost, fewer transfers, lexicographically
// smallest route id sequence); the search key includes all three, so results
// are deterministic including tie cases.
std::vector<TripPlan> plan_all(const net::Network& net, const Dataset& ds,
                               const SensitivitySet& sens, const SimConfig& cfg);

// Replans only trips whose current plan rides a removed route. Previously
// infeasible trips stay infeasible (removal never adds capacity to plan with).
void replan_affected(const net::Network& net, const Dataset& ds,
                     const SensitivitySet& sens, const SimConfig& cfg,
                     std::vector<TripPlan>& plans);

TripPlan plan_single(const net::Network& net, int origin_stop, int dest_stop,
                     Group g, const SensitivitySet& sens, const SimConfig& cfg);

}  // namespace busim::plan
