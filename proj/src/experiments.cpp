#include "busim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "busim/csv.hpp"
#include "busim/rng.hpp"

namespace busim::exp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double group_mean_d(const sim::SimResult& r, size_t g) {
  const sim::GroupAggregate& a = r.by_group[g];
  return a.n_completed > 0 ? a.mean_d : kNan;
}

ScenarioResult summarize(const std::string& id,
                         const std::vector<std::string>& removed,
                         const sim::SimResult& scen,
                         const sim::SimResult& base) {
  ScenarioResult s;
  s.scenario_id = id;
  s.removed_routes = removed;
  for (size_t g = 0; g < kGroupCount; ++g) {
    s.mean_d[g] = group_mean_d(scen, g);
    s.delta_d[g] = s.mean_d[g] - group_mean_d(base, g);
  }
  s.overall_d = scen.overall.n_completed > 0 ? scen.overall.mean_d : kNan;
  s.overall_delta_d =
      s.overall_d - (base.overall.n_completed > 0 ? base.overall.mean_d : kNan);
  s.failure_rate = scen.overall.failure_rate;
  s.mean_waiting_min = scen.overall.mean_waiting_min;
  s.mean_load_ratio = scen.mean_load_ratio;
  return s;
}

}  // namespace

BaselineRun run_baseline(const Dataset& ds, const SensitivitySet& sens,
                         const SimConfig& cfg) {
  BaselineRun run;
  run.network = net::build_network(ds, cfg);
  run.plans = plan::plan_all(run.network, ds, sens, cfg);
  run.result = sim::run_simulation(run.network, ds, run.plans, sens, cfg);
  return run;
}

ScenarioResult run_single_removal(const Dataset& ds, const BaselineRun& baseline,
                                  const std::string& route_id,
                                  const SensitivitySet& sens,
                                  const SimConfig& cfg,
                                  sim::SimResult* scenario_out) {
  net::Network network = baseline.network;
  net::remove_route(network, route_id);
  std::vector<plan::TripPlan> plans = baseline.plans;
  plan::replan_affected(network, ds, sens, cfg, plans);
  sim::SimResult result = sim::run_simulation(network, ds, plans, sens, cfg);
  ScenarioResult s =
      summarize("remove:" + route_id, {route_id}, result, baseline.result);
  if (scenario_out != nullptr) *scenario_out = std::move(result);
  return s;
}

SweepCurve run_sweep(const Dataset& ds, const std::string& dimension,
                     const feat::Coefficients& coefficients,
                     const SensitivitySet& sens, const SimConfig& cfg,
                     bool dynamic_ranking, int jobs,
                     const BaselineRun* baseline) {
  const auto dim_it = coefficients.find(dimension);
  if (dim_it == coefficients.end()) {
    throw ValidationError("no coefficients supplied for dimension '" + dimension +
                          "'");
  }

  SweepCurve curve;
  curve.dimension = dimension;

  BaselineRun owned;
  if (baseline == nullptr) {
    owned = run_baseline(ds, sens, cfg);
    baseline = &owned;
  }
  const BaselineRun& base = *baseline;
  const int n_routes = base.network.active_route_count();
  const int n_remove = static_cast<int>(std::ceil(0.6 * n_routes));

  SweepPoint p0;
  p0.step = 0;
  p0.overall_d = base.result.overall.n_completed > 0 ? base.result.overall.mean_d : kNan;
  for (size_t g = 0; g < kGroupCount; ++g) p0.mean_d[g] = group_mean_d(base.result, g);
  p0.failure_rate = base.result.overall.failure_rate;
  curve.points.resize(static_cast<size_t>(n_remove) + 1);
  curve.points[0] = p0;

  if (!dynamic_ranking) {
    // rank once at baseline; step k then depends only on the first k names,
    // so the points can be computed independently (each replan starts from
    // the baseline plans, which yields the same plans as stepwise replanning
    // because removal only shrinks the planner's search space)
    const auto scores =
        feat::score_routes(feat::compute_route_features(base.network, ds,
                                                        base.plans, cfg),
                           dimension, dim_it->second, &curve.warnings);
    std::vector<std::string> order(scores.size());
    for (const feat::FeatureScore& s : scores) {
      order[static_cast<size_t>(s.rank - 1)] = s.route_id;
    }
    order.resize(static_cast<size_t>(n_remove));
    curve.removal_order = order;

    parallel_for(n_remove, jobs, [&](int i) {
      const int step = i + 1;
      net::Network network = base.network;
      for (int k = 0; k < step; ++k) {
        net::remove_route(network, order[static_cast<size_t>(k)]);
      }
      std::vector<plan::TripPlan> plans = base.plans;
      plan::replan_affected(network, ds, sens, cfg, plans);
      const sim::SimResult result =
          sim::run_simulation(network, ds, plans, sens, cfg);
      SweepPoint pt;
      pt.step = step;
      pt.removed_route = order[static_cast<size_t>(step - 1)];
      pt.overall_d = result.overall.n_completed > 0 ? result.overall.mean_d : kNan;
      for (size_t g = 0; g < kGroupCount; ++g) pt.mean_d[g] = group_mean_d(result, g);
      pt.failure_rate = result.overall.failure_rate;
      curve.points[static_cast<size_t>(step)] = pt;
    });
    return curve;
  }

  // dynamic mode: re-score the surviving network before each removal
  net::Network network = base.network;
  std::vector<plan::TripPlan> plans = base.plans;
  for (int step = 1; step <= n_remove; ++step) {
    const auto scores = feat::score_routes(
        feat::compute_route_features(network, ds, plans, cfg), dimension,
        dim_it->second, &curve.warnings);
    std::string victim;
    for (const feat::FeatureScore& s : scores) {
      if (s.rank == 1) victim = s.route_id;
    }
    net::remove_route(network, victim);
    plan::replan_affected(network, ds, sens, cfg, plans);
    const sim::SimResult result =
        sim::run_simulation(network, ds, plans, sens, cfg);
    curve.removal_order.push_back(victim);
    SweepPoint pt;
    pt.step = step;
    pt.removed_route = victim;
    pt.overall_d = result.overall.n_completed > 0 ? result.overall.mean_d : kNan;
    for (size_t g = 0; g < kGroupCount; ++g) pt.mean_d[g] = group_mean_d(result, g);
    pt.failure_rate = result.overall.failure_rate;
    curve.points[static_cast<size_t>(step)] = pt;
  }
  return curve;
}

namespace {

std::vector<std::string> connecting_routes(const net::Network& network,
                                           const std::vector<plan::TripPlan>& plans) {
  std::set<int> used;
  for (const plan::TripPlan& p : plans) {
    if (!p.feasible) continue;
    for (size_t k = 1; k < p.legs.size(); ++k) used.insert(p.legs[k].route);
  }
  std::vector<std::string> names;
  for (int r : used) names.push_back(network.routes[static_cast<size_t>(r)].id);
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

OfatReport run_ofat(const Dataset& ds, const BaselineRun& baseline,
                    const std::string& scenario, double magnitude,
                    const SensitivitySet& sens, const SimConfig& cfg) {
  if (!(magnitude > 0.0)) {
    throw ValidationError("ofat magnitude must be positive");
  }

  OfatReport rep;
  rep.scenario = scenario;
  rep.magnitude = magnitude;
  rep.baseline_load_ratio = baseline.result.mean_load_ratio;

  Dataset scen_ds = ds;
  if (scenario == "WAIT+") {
    rep.driver = "beta_W";
    for (auto& r : scen_ds.routes) r.headway_min *= magnitude;
  } else if (scenario == "TIME+") {
    rep.driver = "beta_L";
    for (auto& r : scen_ds.routes) r.v_off_kmh *= magnitude;
  } else if (scenario == "CROWD+") {
    rep.driver = "beta_C";
    for (auto& r : scen_ds.routes) {
      r.capacity = std::max(1, static_cast<int>(std::llround(r.capacity * magnitude)));
    }
  } else if (scenario == "XFER+") {
    rep.driver = "beta_T";
    rep.adjusted_routes = connecting_routes(baseline.network, baseline.plans);
    std::set<std::string> adjust(rep.adjusted_routes.begin(),
                                 rep.adjusted_routes.end());
    for (auto& r : scen_ds.routes) {
      if (adjust.count(r.id) > 0) r.headway_min *= magnitude;
    }
  } else {
    throw ValidationError("unknown ofat scenario '" + scenario +
                          "' (expected WAIT+, TIME+, CROWD+ or XFER+)");
  }

  for (size_t g = 0; g < kGroupCount; ++g) {
    const SensitivityProfile& p = sens.by_group[g];
    rep.expected_beta[g] = rep.driver == "beta_L"   ? p.travel
                           : rep.driver == "beta_T" ? p.transfer
                           : rep.driver == "beta_W" ? p.waiting
                                                    : p.crowding;
  }

  // the driver feeds the planner's expected costs too, so plans are rebuilt
  // from scratch under the scenario parameters
  const BaselineRun scen = run_baseline(scen_ds, sens, cfg);

  const double base_overall = baseline.result.overall.n_completed > 0
                                  ? baseline.result.overall.mean_d
                                  : kNan;
  // relative change of the driver exposure, not of the knob: TIME+ scales
  // speed but the exposure is travel time (~1/v), CROWD+ scales capacity but
  // the exposure is the load ratio (~1/capacity)
  const double dx = (rep.driver == "beta_L" || rep.driver == "beta_C")
                        ? 1.0 / magnitude - 1.0
                        : magnitude - 1.0;
  std::vector<double> pooled(kGroupCount, 0.0);
  for (size_t g = 0; g < kGroupCount; ++g) {
    OfatGroupRow& row = rep.rows[g];
    row.baseline_d = group_mean_d(baseline.result, g);
    row.scenario_d = group_mean_d(scen.result, g);
    row.baseline_w_min = baseline.result.by_group[g].mean_waiting_min;
    row.scenario_w_min = scen.result.by_group[g].mean_waiting_min;
    if (dx == 0.0) {
      row.elasticity = 0.0;
      row.elasticity_pooled_base = 0.0;
    } else {
      row.elasticity = (row.scenario_d - row.baseline_d) / row.baseline_d / dx;
      row.elasticity_pooled_base =
          (row.scenario_d - row.baseline_d) / base_overall / dx;
    }
    pooled[g] = row.elasticity_pooled_base;
  }

  if (scenario == "CROWD+" && rep.baseline_load_ratio < 0.3) {
    rep.low_signal = true;
    rep.note = "low crowding level: baseline mean load ratio " +
               csv::format_double(rep.baseline_load_ratio) + " < 0.3";
  }

  if (dx == 0.0) {
    rep.pass = false;
    rep.note = rep.note.empty() ? "magnitude 1.0 produces no driver change"
                                : rep.note;
    rep.spearman.defined = false;
    rep.spearman.statistic = kNan;
    rep.spearman.note = "undefined: zero driver change";
    return rep;
  }

  const std::vector<double> expected(rep.expected_beta.begin(),
                                     rep.expected_beta.end());
  rep.spearman = stats::spearman_vs_expected(pooled, expected);
  rep.pass = rep.spearman.defined &&
             std::fabs(rep.spearman.statistic - 1.0) < 1e-12 && !rep.low_signal;
  return rep;
}

PerturbationReport run_perturbation(const Dataset& ds, const BaselineRun& baseline,
                                    const SensitivitySet& sens, const SimConfig& cfg,
                                    int n_samples, double global_range,
                                    double individual_range, bool fast_mode,
                                    uint64_t seed, int jobs) {
  if (n_samples < 1) throw ValidationError("perturbation needs >= 1 sample");
  PerturbationReport rep;
  rep.n_samples = n_samples;
  rep.fast_mode = fast_mode;

  std::array<std::array<double, 4>, kGroupCount> base_components{};
  for (size_t g = 0; g < kGroupCount; ++g) {
    const sim::GroupAggregate& a = baseline.result.by_group[g];
    if (a.n_completed == 0) {
      throw ValidationError("perturbation needs completed trips in group " +
                            std::string(group_name(kAllGroups[g])));
    }
    base_components[g] = {a.mean_l, a.mean_t, a.mean_w, a.mean_c};
    rep.baseline_mean_d[g] = a.mean_d;
  }
  const std::vector<double> base_vec(rep.baseline_mean_d.begin(),
                                     rep.baseline_mean_d.end());

  // draw every factor up front in a fixed order so fast and full mode see
  // identical perturbations
  rep.samples.resize(static_cast<size_t>(n_samples));
  Rng rng(Rng::derive(seed, 0x7065727475726221ull));
  for (auto& s : rep.samples) {
    s.global_factor = rng.uniform(1.0 - global_range, 1.0 + global_range);
    for (double& u : s.weight_factors) {
      u = rng.uniform(1.0 - individual_range, 1.0 + individual_range);
    }
  }

  auto perturbed_profile = [&](const PerturbationSample& s, size_t g) {
    const SensitivityProfile& p = sens.by_group[g];
    SensitivityProfile q;
    q.travel = p.travel * s.global_factor * s.weight_factors[g * 4 + 0];
    q.transfer = p.transfer * s.global_factor * s.weight_factors[g * 4 + 1];
    q.waiting = p.waiting * s.global_factor * s.weight_factors[g * 4 + 2];
    q.crowding = p.crowding * s.global_factor * s.weight_factors[g * 4 + 3];
    return q;
  };

  auto evaluate = [&](int i) {
    PerturbationSample& s = rep.samples[static_cast<size_t>(i)];
    if (fast_mode) {
      // mean D is linear in beta for frozen components, so re-scoring the
      // per-group mean components equals per-trip recomputation exactly
      for (size_t g = 0; g < kGroupCount; ++g) {
        const SensitivityProfile q = perturbed_profile(s, g);
        const auto& c = base_components[g];
        s.mean_d[g] =
            q.travel * c[0] + q.transfer * c[1] + q.waiting * c[2] + q.crowding * c[3];
      }
    } else {
      SensitivitySet scaled;
      for (size_t g = 0; g < kGroupCount; ++g) {
        scaled.by_group[g] = perturbed_profile(s, g);
      }
      const BaselineRun run = run_baseline(ds, scaled, cfg);
      for (size_t g = 0; g < kGroupCount; ++g) {
        s.mean_d[g] = group_mean_d(run.result, g);
      }
    }
    const std::vector<double> sample_vec(s.mean_d.begin(), s.mean_d.end());
    const stats::RankTestResult k = stats::kendall(base_vec, sample_vec);
    s.tau = k.statistic;
    s.retained = k.defined && s.tau >= 1.0 - 1e-12;
  };

  if (fast_mode) {
    for (int i = 0; i < n_samples; ++i) evaluate(i);
  } else {
    parallel_for(n_samples, jobs, evaluate);
  }

  long long retained = 0;
  for (const auto& s : rep.samples) retained += s.retained ? 1 : 0;
  rep.retention_rate = static_cast<double>(retained) / n_samples;

  // pooled standardization over all (sample, group) values
  std::vector<double> all;
  all.reserve(static_cast<size_t>(n_samples) * kGroupCount);
  for (const auto& s : rep.samples) {
    for (double d : s.mean_d) all.push_back(d);
  }
  const double m = stats::mean(all);
  const double sd = stats::stddev(all, 0);
  for (size_t g = 0; g < kGroupCount; ++g) {
    std::vector<double> z;
    z.reserve(static_cast<size_t>(n_samples));
    for (const auto& s : rep.samples) {
      z.push_back(sd > 0.0 ? (s.mean_d[g] - m) / sd : 0.0);
    }
    rep.z_q25[g] = stats::quantile(z, 0.25);
    rep.z_q75[g] = stats::quantile(z, 0.75);
  }
  rep.iqr_gap_elderly_student =
      rep.z_q25[static_cast<size_t>(Group::Elderly)] -
      rep.z_q75[static_cast<size_t>(Group::Student)];
  rep.iqr_gap_disabled_general =
      rep.z_q25[static_cast<size_t>(Group::Disabled)] -
      rep.z_q75[static_cast<size_t>(Group::General)];
  return rep;
}

ValidationReport validate_distributions(const std::vector<sim::TripOutcome>& sim_outcomes,
                                        const std::vector<sim::TripOutcome>& ref_outcomes,
                                        const SimConfig& cfg) {
  auto completed_times = [&](const std::vector<sim::TripOutcome>& v) {
    std::vector<double> out;
    for (const auto& o : v) {
      if (o.status == sim::TripStatus::Completed) {
        out.push_back(o.waiting_min + o.in_vehicle_min);
      }
    }
    return out;
  };
  auto completed_transfers = [&](const std::vector<sim::TripOutcome>& v) {
    std::vector<double> out;
    for (const auto& o : v) {
      if (o.status == sim::TripStatus::Completed) {
        out.push_back(static_cast<double>(o.t));
      }
    }
    return out;
  };

  const std::vector<double> t_sim = completed_times(sim_outcomes);
  const std::vector<double> t_ref = completed_times(ref_outcomes);
  const std::vector<double> x_sim = completed_transfers(sim_outcomes);
  const std::vector<double> x_ref = completed_transfers(ref_outcomes);
  if (t_sim.empty() || t_ref.empty()) {
    throw ValidationError("distribution comparison needs completed trips on both sides");
  }

  ValidationReport rep;
  rep.trip_time.ks = stats::ks_statistic(t_sim, t_ref);
  rep.trip_time.tv = stats::tv_distance(t_sim, t_ref, cfg.step_min);
  rep.transfers.ks = stats::ks_statistic(x_sim, x_ref);
  rep.transfers.tv = stats::tv_distance(x_sim, x_ref, 1.0);

  const double sd_sim = stats::stddev(t_sim, 1);
  const double sd_ref = stats::stddev(t_ref, 1);
  if (t_sim.size() >= 2 && t_ref.size() >= 2 && sd_sim > 0.0 && sd_ref > 0.0) {
    const double h_sim = stats::scott_bandwidth(t_sim);
    const double h_ref = stats::scott_bandwidth(t_ref);
    std::vector<double> both = t_sim;
    both.insert(both.end(), t_ref.begin(), t_ref.end());
    rep.kde_grid = stats::kde_grid(both, std::max(h_sim, h_ref));
    rep.kde_sim = stats::gaussian_kde(t_sim, h_sim, rep.kde_grid);
    rep.kde_ref = stats::gaussian_kde(t_ref, h_ref, rep.kde_grid);
  }

  std::set<long long> bins;
  for (double x : x_sim) bins.insert(static_cast<long long>(x));
  for (double x : x_ref) bins.insert(static_cast<long long>(x));
  for (long long b : bins) {
    rep.transfer_bins.push_back(b);
    double ms = 0.0, mr = 0.0;
    for (double x : x_sim) ms += x == static_cast<double>(b) ? 1.0 : 0.0;
    for (double x : x_ref) mr += x == static_cast<double>(b) ? 1.0 : 0.0;
    rep.transfer_mass_sim.push_back(ms / static_cast<double>(x_sim.size()));
    rep.transfer_mass_ref.push_back(mr / static_cast<double>(x_ref.size()));
  }
  return rep;
}

// ---------------------------------------------------------------- writers

void write_outcomes_csv(const std::string& path, const Dataset& ds,
                        const std::vector<sim::TripOutcome>& outcomes,
                        const std::string& meta_comment) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  if (!meta_comment.empty()) f << "# " << meta_comment << '\n';
  f << "passenger_id,group,status,L,T,W,C,D,in_vehicle_min,waiting_min,"
       "crowded_min\n";
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const sim::TripOutcome& o = outcomes[i];
    f << ds.trips[i].passenger_id << ',' << group_name(ds.trips[i].group) << ','
      << sim::trip_status_name(o.status) << ',' << o.l << ',' << o.t << ','
      << o.w << ',' << o.c << ','
      << (o.status == sim::TripStatus::Completed ? csv::format_double(o.d) : "")
      << ',' << csv::format_double(o.in_vehicle_min) << ','
      << csv::format_double(o.waiting_min) << ','
      << csv::format_double(o.crowded_min) << '\n';
  }
}

std::vector<sim::TripOutcome> read_outcomes_csv(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const int c_status = t.require_column("status");
  const int c_l = t.require_column("L");
  const int c_t = t.require_column("T");
  const int c_w = t.require_column("W");
  const int c_c = t.require_column("C");
  const int c_d = t.require_column("D");
  const int c_iv = t.require_column("in_vehicle_min");
  const int c_wm = t.require_column("waiting_min");
  const int c_cm = t.require_column("crowded_min");
  std::vector<sim::TripOutcome> out(t.rows.size());
  for (size_t r = 0; r < t.rows.size(); ++r) {
    sim::TripOutcome& o = out[r];
    const std::string& status = t.cell(r, c_status);
    if (status == "Completed") {
      o.status = sim::TripStatus::Completed;
    } else if (status == "FailedNoPlan") {
      o.status = sim::TripStatus::FailedNoPlan;
    } else if (status == "FailedHorizon") {
      o.status = sim::TripStatus::FailedHorizon;
    } else {
      throw ValidationError(path + ": unknown trip status '" + status + "'");
    }
    o.l = static_cast<int>(t.integer(r, c_l));
    o.t = static_cast<int>(t.integer(r, c_t));
    o.w = static_cast<int>(t.integer(r, c_w));
    o.c = static_cast<int>(t.integer(r, c_c));
    o.d = t.cell(r, c_d).empty() ? kNan : t.number(r, c_d);
    o.in_vehicle_min = t.number(r, c_iv);
    o.waiting_min = t.number(r, c_wm);
    o.crowded_min = t.number(r, c_cm);
  }
  return out;
}

namespace {

nlohmann::json group_block(const sim::GroupAggregate& a) {
  return nlohmann::json{{"n_total", a.n_total},
                        {"n_completed", a.n_completed},
                        {"n_failed", a.n_failed},
                        {"failure_rate", a.failure_rate},
                        {"mean_d", a.mean_d},
                        {"mean_in_vehicle_min", a.mean_in_vehicle_min},
                        {"mean_transfers", a.mean_transfers},
                        {"mean_waiting_min", a.mean_waiting_min},
                        {"mean_crowded_min", a.mean_crowded_min}};
}

void dump_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f << j.dump(2) << '\n';
}

nlohmann::json group_array(const std::array<double, kGroupCount>& v) {
  nlohmann::json j;
  for (size_t g = 0; g < kGroupCount; ++g) j[group_name(kAllGroups[g])] = v[g];
  return j;
}

}  // namespace

void write_aggregates_json(const std::string& path, const sim::SimResult& result,
                           const std::string& config_hash, uint64_t seed) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  for (size_t g = 0; g < kGroupCount; ++g) {
    j["groups"][group_name(kAllGroups[g])] = group_block(result.by_group[g]);
  }
  j["overall"] = group_block(result.overall);
  j["mean_load_ratio"] = result.mean_load_ratio;
  j["buses_dispatched"] = result.buses_dispatched;
  dump_json(path, j);
}

void write_scenario_json(const std::string& path, const ScenarioResult& s,
                         const std::string& config_hash, uint64_t seed) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["scenario_id"] = s.scenario_id;
  j["removed_routes"] = s.removed_routes;
  j["mean_d"] = group_array(s.mean_d);
  j["delta_d"] = group_array(s.delta_d);
  j["overall_d"] = s.overall_d;
  j["overall_delta_d"] = s.overall_delta_d;
  j["failure_rate"] = s.failure_rate;
  j["mean_waiting_min"] = s.mean_waiting_min;
  j["mean_load_ratio"] = s.mean_load_ratio;
  dump_json(path, j);
}

void write_sweep_csv(const std::string& path, const SweepCurve& curve,
                     const std::string& meta_comment) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  if (!meta_comment.empty()) f << "# " << meta_comment << '\n';
  f << "dimension,step,removed_route,overall_D,D_general,D_student,D_elderly,"
       "D_disabled,failure_rate\n";
  for (const SweepPoint& p : curve.points) {
    f << curve.dimension << ',' << p.step << ',' << p.removed_route << ','
      << csv::format_double(p.overall_d);
    for (size_t g = 0; g < kGroupCount; ++g) {
      f << ',' << csv::format_double(p.mean_d[g]);
    }
    f << ',' << csv::format_double(p.failure_rate) << '\n';
  }
}

void write_ofat_json(const std::string& path, const OfatReport& r,
                     const std::string& config_hash, uint64_t seed) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["scenario"] = r.scenario;
  j["magnitude"] = r.magnitude;
  j["driver"] = r.driver;
  for (size_t g = 0; g < kGroupCount; ++g) {
    const OfatGroupRow& row = r.rows[g];
    j["groups"][group_name(kAllGroups[g])] = {
        {"baseline_d", row.baseline_d},
        {"scenario_d", row.scenario_d},
        {"baseline_waiting_min", row.baseline_w_min},
        {"scenario_waiting_min", row.scenario_w_min},
        {"elasticity", row.elasticity},
        {"elasticity_pooled_base", row.elasticity_pooled_base},
        {"expected_beta", r.expected_beta[g]}};
  }
  j["spearman"] = {{"statistic", r.spearman.statistic},
                   {"defined", r.spearman.defined},
                   {"note", r.spearman.note}};
  j["low_signal"] = r.low_signal;
  j["pass"] = r.pass;
  j["note"] = r.note;
  j["baseline_load_ratio"] = r.baseline_load_ratio;
  j["adjusted_routes"] = r.adjusted_routes;
  dump_json(path, j);
}

void write_perturbation_csv(const std::string& path, const PerturbationReport& r,
                            const std::string& meta_comment) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  if (!meta_comment.empty()) f << "# " << meta_comment << '\n';
  f << "sample,g,D_general,D_student,D_elderly,D_disabled,tau\n";
  for (size_t i = 0; i < r.samples.size(); ++i) {
    const PerturbationSample& s = r.samples[i];
    f << i << ',' << csv::format_double(s.global_factor);
    for (size_t g = 0; g < kGroupCount; ++g) {
      f << ',' << csv::format_double(s.mean_d[g]);
    }
    f << ',' << csv::format_double(s.tau) << '\n';
  }
}

void write_perturbation_json(const std::string& path, const PerturbationReport& r,
                             const std::string& config_hash, uint64_t seed) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["n_samples"] = r.n_samples;
  j["fast_mode"] = r.fast_mode;
  j["baseline_mean_d"] = group_array(r.baseline_mean_d);
  j["retention_rate"] = r.retention_rate;
  j["standardized_q25"] = group_array(r.z_q25);
  j["standardized_q75"] = group_array(r.z_q75);
  j["iqr_gap_elderly_minus_student"] = r.iqr_gap_elderly_student;
  j["iqr_gap_disabled_minus_general"] = r.iqr_gap_disabled_general;
  dump_json(path, j);
}

void write_validation_json(const std::string& path, const ValidationReport& r,
                           const std::string& config_hash, uint64_t seed) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["trip_time"] = {{"ks", r.trip_time.ks}, {"tv", r.trip_time.tv}};
  j["transfers"] = {{"ks", r.transfers.ks}, {"tv", r.transfers.tv}};
  j["kde"] = {{"grid", r.kde_grid}, {"sim", r.kde_sim}, {"ref", r.kde_ref}};
  j["transfer_hist"] = {{"bins", r.transfer_bins},
                        {"sim", r.transfer_mass_sim},
                        {"ref", r.transfer_mass_ref}};
  dump_json(path, j);
}

}  // namespace busim::exp
