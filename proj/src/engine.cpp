#include "busim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "busim/kernels.hpp"
#include "busim/speed.hpp"

namespace busim::sim {

const char* trip_status_name(TripStatus s) {
  switch (s) {
    case TripStatus::Completed: return "Completed";
    case TripStatus::FailedNoPlan: return "FailedNoPlan";
    case TripStatus::FailedHorizon: return "FailedHorizon";
  }
  return "Unknown";
}

double compute_dissatisfaction(const SensitivityProfile& w, double l, double t,
                               double wait, double c) {
  return w.travel * l + w.transfer * t + w.waiting * wait + w.crowding * c;
}

namespace {

enum class Phase : uint8_t { NotSpawned, Waiting, Onboard, Done };

struct Pax {
  Phase phase = Phase::NotSpawned;
  TripStatus status = TripStatus::FailedHorizon;
  int leg = 0;
  int bus = -1;
  int l = 0, t = 0, w = 0, c = 0;
  int spawn_step = -1;
  int ready_step = -1;  // queue ordering key; frozen while queued
  std::vector<std::array<int, 3>> leg_steps;
};

struct Bus {
  int route = -1;
  int dir = +1;
  int pos = 0;
  double residual_m = 0.0;  // distance left to the next stop in `dir`
  std::vector<int> onboard;
};

struct Crossing {
  double fraction;  // of the step's travel, in (0, 1]; 0 for fresh dispatches
  int bus;
  int pos;
  int dir_after;  // terminals turn the bus around before boarding
};

}  // namespace

SimResult run_simulation(const net::Network& net, const Dataset& ds,
                         const std::vector<plan::TripPlan>& plans,
                         const SensitivitySet& sens, const SimConfig& cfg) {
  const size_t n_trips = ds.trips.size();
  SimResult res;
  res.outcomes.resize(n_trips);

  std::vector<Pax> pax(n_trips);
  size_t remaining = n_trips;

  for (size_t i = 0; i < n_trips; ++i) {
    if (!plans[i].feasible) {
      pax[i].phase = Phase::Done;
      pax[i].status = TripStatus::FailedNoPlan;
      --remaining;
    }
  }

  // spawn order: by departure minute, then input order
  std::vector<size_t> spawn_order;
  spawn_order.reserve(n_trips);
  for (size_t i = 0; i < n_trips; ++i) spawn_order.push_back(i);
  std::stable_sort(spawn_order.begin(), spawn_order.end(),
                   [&](size_t a, size_t b) {
                     return ds.trips[a].departure_min < ds.trips[b].departure_min;
                   });
  size_t next_spawn = 0;

  // waiting queues: FIFO by (arrival step, passenger id)
  struct QueueCmp {
    const std::vector<Pax>* pax;
    const Dataset* ds;
    bool operator()(size_t a, size_t b) const {
      const int ra = (*pax)[a].ready_step;
      const int rb = (*pax)[b].ready_step;
      if (ra != rb) return ra < rb;
      return ds->trips[a].passenger_id < ds->trips[b].passenger_id;
    }
  };
  std::vector<std::set<size_t, QueueCmp>> queue(
      net.stops.size(), std::set<size_t, QueueCmp>(QueueCmp{&pax, &ds}));

  std::vector<Bus> buses;
  // dispatch clock per route and direction (+1 slot 0, -1 slot 1)
  std::vector<std::array<double, 2>> next_dep(net.routes.size());
  for (size_t r = 0; r < net.routes.size(); ++r) {
    next_dep[r] = {net.routes[r].first_departure_min,
                   net.routes[r].first_departure_min};
  }

  double load_ratio_sum = 0.0;
  long long load_ratio_count = 0;

  std::vector<Crossing> crossings;
  const int max_steps = static_cast<int>(cfg.horizon_min / cfg.step_min);
  int step = 0;

  for (; step < max_steps && remaining > 0; ++step) {
    const double t0 = static_cast<double>(step) * cfg.step_min;
    const double t1 = t0 + cfg.step_min;

    // passengers entering this step join the queue at their origin
    while (next_spawn < n_trips &&
           ds.trips[spawn_order[next_spawn]].departure_min < t1) {
      const size_t i = spawn_order[next_spawn++];
      if (pax[i].phase == Phase::Done) continue;  // no feasible plan
      pax[i].phase = Phase::Waiting;
      pax[i].spawn_step = step;
      pax[i].ready_step = step;
      pax[i].leg_steps.push_back({step, -1, -1});
      queue[plans[i].legs[0].board_stop].insert(i);
    }

    crossings.clear();

    // dispatch: a bus enters service at the first step boundary at or after
    // its scheduled departure, sitting at the terminal for that direction
    for (size_t r = 0; r < net.routes.size(); ++r) {
      const auto& route = net.routes[r];
      if (!route.active) continue;
      const int len = static_cast<int>(route.stops.size());
      for (int slot = 0; slot < 2; ++slot) {
        while (next_dep[r][slot] <= t0) {
          Bus b;
          b.route = static_cast<int>(r);
          b.dir = slot == 0 ? +1 : -1;
          b.pos = slot == 0 ? 0 : len - 1;
          b.residual_m = slot == 0 ? route.seg_len_m[0] : route.seg_len_m[len - 2];
          const int id = static_cast<int>(buses.size());
          buses.push_back(std::move(b));
          ++res.buses_dispatched;
          crossings.push_back({0.0, id, buses[id].pos, buses[id].dir});
          next_dep[r][slot] += route.headway_min;
        }
      }
    }

    // advance every bus by speed * step, recording stop crossings
    for (size_t bi = 0; bi < buses.size(); ++bi) {
      Bus& b = buses[bi];
      const auto& route = net.routes[b.route];
      const int len = static_cast<int>(route.stops.size());
      const double dist = step_distance_m(cfg.speed, route.v_off_kmh, t0, cfg.step_min);
      double left = dist;
      while (left >= b.residual_m) {
        left -= b.residual_m;
        b.pos += b.dir;
        if (b.pos == 0 || b.pos == len - 1) b.dir = -b.dir;
        crossings.push_back(
            {(dist - left) / dist, static_cast<int>(bi), b.pos, b.dir});
        b.residual_m = b.dir > 0 ? route.seg_len_m[b.pos]
                                 : route.seg_len_m[b.pos - 1];
      }
      b.residual_m -= left;
    }

    std::stable_sort(crossings.begin(), crossings.end(),
                     [](const Crossing& a, const Crossing& b) {
                       if (a.fraction != b.fraction) return a.fraction < b.fraction;
                       return a.bus < b.bus;
                     });

    for (const Crossing& ev : crossings) {
      Bus& b = buses[ev.bus];
      const auto& route = net.routes[b.route];
      const int stop = route.stops[ev.pos];

      // alight first
      for (size_t k = 0; k < b.onboard.size();) {
        const size_t i = b.onboard[k];
        const plan::Leg& leg = plans[i].legs[pax[i].leg];
        if (leg.alight_stop != stop) {
          ++k;
          continue;
        }
        b.onboard.erase(b.onboard.begin() + k);
        pax[i].leg_steps.back()[2] = step;
        pax[i].bus = -1;
        if (pax[i].leg + 1 == static_cast<int>(plans[i].legs.size())) {
          pax[i].phase = Phase::Done;
          pax[i].status = TripStatus::Completed;
          --remaining;
        } else {
          // instantaneous transfer walk, then wait at the next board stop
          pax[i].leg += 1;
          pax[i].phase = Phase::Waiting;
          pax[i].ready_step = step;
          pax[i].leg_steps.push_back({step, -1, -1});
          queue[plans[i].legs[pax[i].leg].board_stop].insert(i);
        }
      }

      // board FIFO while capacity remains
      auto& q = queue[stop];
      for (auto it = q.begin(); it != q.end();) {
        if (static_cast<int>(b.onboard.size()) >= route.capacity) break;
        const size_t i = *it;
        const plan::Leg& leg = plans[i].legs[pax[i].leg];
        if (leg.route == b.route && leg.board_dir == ev.dir_after) {
          it = q.erase(it);
          pax[i].phase = Phase::Onboard;
          pax[i].bus = ev.bus;
          pax[i].t += 1;  // boardings; transfers = boardings - 1 at finalize
          pax[i].leg_steps.back()[1] = step;
          b.onboard.push_back(i);
        } else {
          ++it;
        }
      }
    }

    // end-of-step accounting
    std::vector<char> crowded(buses.size(), 0);
    for (size_t bi = 0; bi < buses.size(); ++bi) {
      const auto& route = net.routes[buses[bi].route];
      const double ratio =
          static_cast<double>(buses[bi].onboard.size()) / route.capacity;
      crowded[bi] = ratio >= cfg.crowding_threshold ? 1 : 0;
      load_ratio_sum += ratio;
      ++load_ratio_count;
    }
    for (size_t i = 0; i < n_trips; ++i) {
      if (pax[i].phase == Phase::Waiting) {
        pax[i].w += 1;
      } else if (pax[i].phase == Phase::Onboard) {
        pax[i].l += 1;
        if (crowded[pax[i].bus]) pax[i].c += 1;
      }
    }
  }
  res.steps_simulated = step;

  // finalize outcomes; anything unfinished failed on the horizon
  for (size_t i = 0; i < n_trips; ++i) {
    TripOutcome& out = res.outcomes[i];
    if (pax[i].phase != Phase::Done) {
      pax[i].status = TripStatus::FailedHorizon;
    }
    out.status = pax[i].status;
    out.l = pax[i].l;
    out.t = pax[i].t > 0 ? pax[i].t - 1 : 0;
    out.w = pax[i].w;
    out.c = pax[i].c;
    out.spawn_step = pax[i].spawn_step;
    out.leg_steps = std::move(pax[i].leg_steps);
    out.in_vehicle_min = out.l * static_cast<double>(cfg.step_min);
    out.waiting_min = out.w * static_cast<double>(cfg.step_min);
    out.crowded_min = out.c * static_cast<double>(cfg.step_min);
  }

  // dissatisfaction for completed trips, batched per group
  for (Group g : kAllGroups) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < n_trips; ++i) {
      if (res.outcomes[i].status == TripStatus::Completed &&
          ds.trips[i].group == g) {
        idx.push_back(i);
      }
    }
    if (idx.empty()) continue;
    std::vector<double> l(idx.size()), t(idx.size()), w(idx.size()), c(idx.size()),
        d(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) {
      const TripOutcome& o = res.outcomes[idx[k]];
      l[k] = o.l;
      t[k] = o.t;
      w[k] = o.w;
      c[k] = o.c;
    }
    const SensitivityProfile& prof = sens.of(g);
    kernels::active().dissatisfaction(l.data(), t.data(), w.data(), c.data(),
                                      idx.size(), prof.travel, prof.transfer,
                                      prof.waiting, prof.crowding, d.data());
    for (size_t k = 0; k < idx.size(); ++k) res.outcomes[idx[k]].d = d[k];
  }

  // aggregates
  auto accumulate = [&](GroupAggregate& agg, const std::vector<size_t>& ids) {
    agg.n_total = static_cast<long long>(ids.size());
    double sums[4] = {0, 0, 0, 0};
    double d_sum = 0.0;
    for (size_t i : ids) {
      const TripOutcome& o = res.outcomes[i];
      if (o.status == TripStatus::Completed) {
        ++agg.n_completed;
        sums[0] += o.l;
        sums[1] += o.t;
        sums[2] += o.w;
        sums[3] += o.c;
        d_sum += o.d;
      } else {
        ++agg.n_failed;
      }
    }
    if (agg.n_total > 0) {
      agg.failure_rate = static_cast<double>(agg.n_failed) / agg.n_total;
    }
    if (agg.n_completed > 0) {
      const double n = static_cast<double>(agg.n_completed);
      agg.mean_l = sums[0] / n;
      agg.mean_t = sums[1] / n;
      agg.mean_w = sums[2] / n;
      agg.mean_c = sums[3] / n;
      agg.mean_d = d_sum / n;
      agg.mean_in_vehicle_min = agg.mean_l * cfg.step_min;
      agg.mean_transfers = agg.mean_t;
      agg.mean_waiting_min = agg.mean_w * cfg.step_min;
      agg.mean_crowded_min = agg.mean_c * cfg.step_min;
    }
  };

  std::vector<size_t> all_ids;
  all_ids.reserve(n_trips);
  for (Group g : kAllGroups) {
    std::vector<size_t> ids;
    for (size_t i = 0; i < n_trips; ++i) {
      if (ds.trips[i].group == g) ids.push_back(i);
    }
    accumulate(res.by_group[static_cast<size_t>(g)], ids);
    all_ids.insert(all_ids.end(), ids.begin(), ids.end());
  }
  std::sort(all_ids.begin(), all_ids.end());
  accumulate(res.overall, all_ids);

  if (load_ratio_count > 0) {
    res.mean_load_ratio = load_ratio_sum / static_cast<double>(load_ratio_count);
  }
  return res;
}

}  // namespace busim::sim
