#include "busim/planner.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <queue>

namespace busim::plan {

bool TripPlan::uses_inactive_route(const net::Network& net) const {
  for (const Leg& leg : legs) {
    if (!net.routes[leg.route].active) return true;
  }
  return false;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr uint16_t kNoRoute = 0;  // seq arrays are padded with 0; ranks are 1-based

using Seq = std::array<uint16_t, 4>;

// State space of the search. Idle states are (stop, walked?, boardings);
// onboard states are (route position, direction, boardings). Positions index
// the route's stop sequence, so a stop appearing twice on a route yields two
// distinct onboard states. Direction flips are zero-cost edges that exist
// only at the terminals, mirroring how buses actually turn around.
struct Ctx {
  const net::Network* net = nullptr;
  const SimConfig* cfg = nullptr;

  int n_stops = 0;
  int nb = 0;  // boardings take values 0..transfer_cap+1
  int idle_states = 0;
  int total_states = 0;

  std::vector<std::vector<std::pair<int, int>>> board_options;  // stop -> (route, pos)
  std::vector<std::vector<int>> transfer_adj;
  std::vector<int> rp_offset;    // route -> first rp index
  std::vector<int> rp_route;     // rp -> route
  std::vector<int> rp_pos;       // rp -> position
  std::vector<uint16_t> lex_rank;  // route -> 1-based rank of its id
  std::vector<double> wait_steps;  // route -> (headway / 2) / step_min

  int idle_id(int stop, int walked, int b) const {
    return ((stop * 2 + walked) * nb) + b;
  }
  int onboard_id(int rp, int dir, int b) const {
    return idle_states + ((rp * 2 + dir) * nb) + b;
  }
  int boardings_of(int id) const {
    return (id < idle_states ? id : id - idle_states) % nb;
  }
};

Ctx make_ctx(const net::Network& net, const SimConfig& cfg) {
  Ctx c;
  c.net = &net;
  c.cfg = &cfg;
  c.n_stops = static_cast<int>(net.stops.size());
  c.nb = cfg.transfer_cap + 2;

  const int nr = static_cast<int>(net.routes.size());
  c.board_options.resize(c.n_stops);
  c.rp_offset.resize(nr, 0);
  c.wait_steps.resize(nr, 0.0);
  int rp = 0;
  for (int r = 0; r < nr; ++r) {
    const auto& route = net.routes[r];
    c.rp_offset[r] = rp;
    for (size_t p = 0; p < route.stops.size(); ++p) {
      c.rp_route.push_back(r);
      c.rp_pos.push_back(static_cast<int>(p));
      if (route.active) {
        c.board_options[route.stops[p]].emplace_back(r, static_cast<int>(p));
      }
      ++rp;
    }
    c.wait_steps[r] = (route.headway_min / 2.0) / cfg.step_min;
  }

  c.idle_states = c.n_stops * 2 * c.nb;
  c.total_states = c.idle_states + rp * 2 * c.nb;

  c.transfer_adj.resize(c.n_stops);
  for (const auto& [a, b] : net.transfer_edges) {
    c.transfer_adj[a].push_back(b);
    c.transfer_adj[b].push_back(a);
  }
  for (auto& v : c.transfer_adj) std::sort(v.begin(), v.end());

  std::vector<std::pair<std::string, int>> ids;
  ids.reserve(nr);
  for (int r = 0; r < nr; ++r) ids.emplace_back(net.routes[r].id, r);
  std::sort(ids.begin(), ids.end());
  c.lex_rank.resize(nr, 0);
  for (size_t i = 0; i < ids.size(); ++i) {
    c.lex_rank[ids[i].second] = static_cast<uint16_t>(i + 1);
  }
  return c;
}

struct Labels {
  std::vector<double> cost;
  std::vector<Seq> seq;
  std::vector<int> parent;
  std::vector<char> settled;

  void reset(int n) {
    cost.assign(n, kInf);
    seq.assign(n, Seq{kNoRoute, kNoRoute, kNoRoute, kNoRoute});
    parent.assign(n, -1);
    settled.assign(n, 0);
  }
};

struct Entry {
  double cost;
  uint8_t boardings;
  Seq seq;
  int state;
};

struct EntryGreater {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    if (a.boardings != b.boardings) return a.boardings > b.boardings;
    if (a.seq != b.seq) return a.seq > b.seq;
    return a.state > b.state;
  }
};

// Settles every state reachable from (origin, fresh, 0 boardings) for the
// given weights. Edge costs are non-negative and the (cost, boardings, route
// sequence) key never decreases along an edge, so the first settlement of a
// state carries its minimal key.
void single_source(const Ctx& c, int origin, const SensitivityProfile& w,
                   Labels& lab) {
  lab.reset(c.total_states);
  std::priority_queue<Entry, std::vector<Entry>, EntryGreater> pq;

  const int start = c.idle_id(origin, 0, 0);
  lab.cost[start] = 0.0;
  pq.push({0.0, 0, lab.seq[start], start});

  const int max_boardings = c.nb - 1;

  auto relax = [&](int to, double cost, const Seq& seq, int parent) {
    if (cost < lab.cost[to] || (cost == lab.cost[to] && seq < lab.seq[to])) {
      lab.cost[to] = cost;
      lab.seq[to] = seq;
      lab.parent[to] = parent;
      pq.push({cost, static_cast<uint8_t>(c.boardings_of(to)), seq, to});
    }
  };

  while (!pq.empty()) {
    const Entry e = pq.top();
    pq.pop();
    const int id = e.state;
    if (lab.settled[id]) continue;
    if (e.cost != lab.cost[id] || e.seq != lab.seq[id]) continue;
    lab.settled[id] = 1;

    if (id < c.idle_states) {
      const int b = id % c.nb;
      const int rest = id / c.nb;
      const int walked = rest & 1;
      const int stop = rest >> 1;

      if (b < max_boardings) {
        const double board_cost =
            e.cost + (b >= 1 ? w.transfer : 0.0);
        for (const auto& [r, p] : c.board_options[stop]) {
          const double cost = board_cost + w.waiting * c.wait_steps[r];
          Seq seq = e.seq;
          seq[b] = c.lex_rank[r];
          const int rp = c.rp_offset[r] + p;
          const int len = static_cast<int>(c.net->routes[r].stops.size());
          if (p + 1 < len) relax(c.onboard_id(rp, 0, b + 1), cost, seq, id);
          if (p > 0) relax(c.onboard_id(rp, 1, b + 1), cost, seq, id);
        }
      }
      if (walked == 0 && b >= 1) {
        for (int s2 : c.transfer_adj[stop]) {
          relax(c.idle_id(s2, 1, b), e.cost, e.seq, id);
        }
      }
    } else {
      const int t = id - c.idle_states;
      const int b = t % c.nb;
      const int u = t / c.nb;
      const int dir = u & 1;
      const int rp = u >> 1;
      const int r = c.rp_route[rp];
      const int p = c.rp_pos[rp];
      const int len = static_cast<int>(c.net->routes[r].stops.size());

      if (dir == 0) {
        if (p + 1 < len) {
          relax(c.onboard_id(rp + 1, 0, b), e.cost + w.travel, e.seq, id);
        } else {
          relax(c.onboard_id(rp, 1, b), e.cost, e.seq, id);  // turn around
        }
      } else {
        if (p > 0) {
          relax(c.onboard_id(rp - 1, 1, b), e.cost + w.travel, e.seq, id);
        } else {
          relax(c.onboard_id(rp, 0, b), e.cost, e.seq, id);
        }
      }
      const int stop = c.net->routes[r].stops[p];
      relax(c.idle_id(stop, 0, b), e.cost, e.seq, id);
    }
  }
}

TripPlan extract(const Ctx& c, const Labels& lab, int dest) {
  int best = -1;
  for (int b = 1; b < c.nb; ++b) {
    const int id = c.idle_id(dest, 0, b);
    if (lab.cost[id] == kInf) continue;
    // ties on cost keep the earlier (fewer-boardings) candidate; equal-cost
    // equal-boardings ties were already resolved inside the search by seq
    if (best < 0 || lab.cost[id] < lab.cost[best]) best = id;
  }
  TripPlan plan;
  if (best < 0) return plan;

  std::vector<int> path;
  for (int id = best; id >= 0; id = lab.parent[id]) path.push_back(id);
  std::reverse(path.begin(), path.end());

  plan.feasible = true;
  plan.planned_cost = lab.cost[best];
  Leg cur;
  for (size_t i = 1; i < path.size(); ++i) {
    const int prev = path[i - 1];
    const int id = path[i];
    const bool prev_idle = prev < c.idle_states;
    const bool id_idle = id < c.idle_states;
    if (prev_idle && !id_idle) {  // board
      const int u = (id - c.idle_states) / c.nb;
      const int rp = u >> 1;
      cur = Leg{};
      cur.route = c.rp_route[rp];
      cur.board_stop = c.net->routes[cur.route].stops[c.rp_pos[rp]];
      cur.board_dir = (u & 1) == 0 ? +1 : -1;
    } else if (!prev_idle && !id_idle) {  // ride or turn
      const int rp_prev = ((prev - c.idle_states) / c.nb) >> 1;
      const int rp_id = ((id - c.idle_states) / c.nb) >> 1;
      if (rp_prev != rp_id) ++cur.ride_segments;
    } else if (!prev_idle && id_idle) {  // alight
      const int rp = ((prev - c.idle_states) / c.nb) >> 1;
      cur.alight_stop = c.net->routes[c.rp_route[rp]].stops[c.rp_pos[rp]];
      plan.legs.push_back(cur);
    }
    // idle -> idle is a transfer walk; nothing to record
  }
  return plan;
}

}  // namespace

TripPlan plan_single(const net::Network& net, int origin_stop, int dest_stop,
                     Group g, const SensitivitySet& sens, const SimConfig& cfg) {
  const Ctx c = make_ctx(net, cfg);
  Labels lab;
  single_source(c, origin_stop, sens.of(g), lab);
  return extract(c, lab, dest_stop);
}

std::vector<TripPlan> plan_all(const net::Network& net, const Dataset& ds,
                               const SensitivitySet& sens, const SimConfig& cfg) {
  std::vector<TripPlan> plans(ds.trips.size());
  const Ctx c = make_ctx(net, cfg);

  std::map<std::pair<int, int>, std::vector<size_t>> by_source;
  for (size_t i = 0; i < ds.trips.size(); ++i) {
    const TripRecord& t = ds.trips[i];
    const int origin = ds.stop_index.at(t.origin_stop);
    by_source[{origin, static_cast<int>(t.group)}].push_back(i);
  }

  Labels lab;
  for (const auto& [key, indices] : by_source) {
    const auto& [origin, group] = key;
    single_source(c, origin, sens.of(static_cast<Group>(group)), lab);
    for (size_t i : indices) {
      plans[i] = extract(c, lab, ds.stop_index.at(ds.trips[i].dest_stop));
    }
  }
  return plans;
}

void replan_affected(const net::Network& net, const Dataset& ds,
                     const SensitivitySet& sens, const SimConfig& cfg,
                     std::vector<TripPlan>& plans) {
  const Ctx c = make_ctx(net, cfg);
  std::map<std::pair<int, int>, std::vector<size_t>> by_source;
  for (size_t i = 0; i < plans.size(); ++i) {
    if (!plans[i].feasible || !plans[i].uses_inactive_route(net)) continue;
    const TripRecord& t = ds.trips[i];
    const int origin = ds.stop_index.at(t.origin_stop);
    by_source[{origin, static_cast<int>(t.group)}].push_back(i);
  }
  Labels lab;
  for (const auto& [key, indices] : by_source) {
    const auto& [origin, group] = key;
    single_source(c, origin, sens.of(static_cast<Group>(group)), lab);
    for (size_t i : indices) {
      plans[i] = extract(c, lab, ds.stop_index.at(ds.trips[i].dest_stop));
    }
  }
}

}  // namespace busim::plan
