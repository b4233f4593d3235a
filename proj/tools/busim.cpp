// busim — agent-based bus network simulator with group-level dissatisfaction
// reporting. One executable, subcommand per pipeline stage; all results land
// under --out with fixed filenames plus a manifest.json recording the config
// hash, seed and input digests.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "busim/config_io.hpp"
#include "busim/csv.hpp"
#include "busim/dataset.hpp"
#include "busim/engine.hpp"
#include "busim/experiments.hpp"
#include "busim/features.hpp"
#include "busim/manifest.hpp"
#include "busim/network.hpp"
#include "busim/planner.hpp"
#include "busim/statkit.hpp"
#include "busim/synth.hpp"
#include "busim/types.hpp"

namespace fs = std::filesystem;
using namespace busim;

namespace {

struct Ctx {
  std::string config_path;
  std::string sensitivity_path;
  std::string out = ".";
  std::string data_dir;
  uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;

  SimConfig cfg;
  SensitivitySet sens;
  std::vector<std::string> inputs;  // digested into the manifest
  mani::RunManifest manifest;

  void prepare() {
    if (!config_path.empty()) {
      cfg = cfgio::load_config(config_path);
      inputs.push_back(config_path);
    }
    if (seed_given) cfg.rng_seed = seed;
    if (!sensitivity_path.empty()) {
      sens = cfgio::load_sensitivity(sensitivity_path);
      inputs.push_back(sensitivity_path);
    } else {
      sens = default_sensitivity();
    }
    fs::create_directories(out);
  }

  Dataset load_data() {
    if (data_dir.empty()) throw ValidationError("--data DIR is required");
    for (const char* f : {"stops.csv", "routes.csv", "trips.csv", "pois.csv"}) {
      const std::string p = data_dir + "/" + f;
      if (fs::exists(p)) inputs.push_back(p);
    }
    return io::load_dataset(data_dir);
  }

  // call after inputs are final; meta() then carries the run identity
  void seal() {
    manifest = mani::make_manifest(cfgio::dump_config(cfg), cfg.rng_seed, inputs);
    mani::write_manifest(out + "/manifest.json", manifest);
  }
  std::string meta() const { return mani::meta_comment(manifest); }
  std::string path(const std::string& name) const { return out + "/" + name; }
};

void add_common(CLI::App* sub, Ctx& ctx) {
  sub->add_option("--config", ctx.config_path,
                  "simulation config file (key = value lines)");
  sub->add_option_function<uint64_t>(
      "--seed",
      [&ctx](const uint64_t& v) {
        ctx.seed = v;
        ctx.seed_given = true;
      },
      "override the config seed");
  sub->add_option("--out", ctx.out, "output directory")->capture_default_str();
  sub->add_option("--jobs", ctx.jobs, "threads for independent scenario runs")
      ->capture_default_str();
  sub->add_option("--sensitivity", ctx.sensitivity_path,
                  "group sensitivity weights JSON (defaults to built-in table)");
}

void progress(const std::string& line) { std::cerr << line << std::endl; }

std::array<double, 4> parse_mix(const std::string& s) {
  std::array<double, 4> mix{};
  std::stringstream in(s);
  std::string tok;
  size_t i = 0;
  while (std::getline(in, tok, ',')) {
    if (i >= 4) throw ValidationError("--mix wants 4 comma-separated shares");
    try {
      mix[i++] = std::stod(tok);
    } catch (const std::exception&) {
      throw ValidationError("--mix: '" + tok + "' is not a number");
    }
  }
  if (i != 4) throw ValidationError("--mix wants 4 comma-separated shares");
  return mix;
}

void cmd_gen_synth(Ctx& ctx, const std::string& topology, int routes, int stops,
                   int trips, const std::string& mix, double peak) {
  ctx.prepare();
  synth::SynthSpec spec;
  spec.topology = synth::topology_from_string(topology);
  spec.n_routes = routes;
  spec.n_stops = stops;
  spec.n_trips = trips;
  if (!mix.empty()) spec.group_mix = parse_mix(mix);
  if (peak >= 0.0) spec.peak_concentration = peak;
  const Dataset ds = synth::generate_synthetic(spec, ctx.cfg.rng_seed);
  io::write_dataset(ds, ctx.out);
  ctx.seal();
  progress("generated " + std::to_string(ds.stops.size()) + " stops, " +
           std::to_string(ds.routes.size()) + " routes, " +
           std::to_string(ds.trips.size()) + " trips, " +
           std::to_string(ds.pois.size()) + " pois -> " + ctx.out);
}

void cmd_net_build(Ctx& ctx) {
  ctx.prepare();
  const Dataset ds = ctx.load_data();
  const net::Network network = net::build_network(ds, ctx.cfg);
  ctx.seal();
  net::write_edges_csv(network, ctx.path("edges.csv"), ctx.meta());
  const net::TopologyMetrics m = net::topology_metrics(network);
  nlohmann::json j;
  j["config_hash"] = ctx.manifest.config_hash;
  j["seed"] = ctx.manifest.seed;
  j["density"] = m.density;
  j["avg_betweenness"] = m.avg_betweenness;
  j["avg_path_length"] = m.avg_path_length;
  j["ride_edges"] = m.ride_edges;
  j["active_stops"] = m.active_stops;
  j["transfer_edges"] = static_cast<long long>(network.transfer_edges.size());
  std::ofstream f(ctx.path("network_metrics.json"), std::ios::binary);
  f << j.dump(2) << '\n';
  progress("network: " + std::to_string(m.active_stops) + " stops, " +
           std::to_string(m.ride_edges) + " ride edges, " +
           std::to_string(network.transfer_edges.size()) + " transfer edges");
}

void cmd_sim_baseline(Ctx& ctx) {
  ctx.prepare();
  const Dataset ds = ctx.load_data();
  ctx.seal();
  progress("planning " + std::to_string(ds.trips.size()) + " trips");
  const exp::BaselineRun run = exp::run_baseline(ds, ctx.sens, ctx.cfg);
  progress("simulated " + std::to_string(run.result.steps_simulated) +
           " steps, dispatched " + std::to_string(run.result.buses_dispatched) +
           " buses, failure rate " +
           csv::format_double(run.result.overall.failure_rate));
  exp::write_outcomes_csv(ctx.path("outcomes.csv"), ds, run.result.outcomes,
                          ctx.meta());
  exp::write_aggregates_json(ctx.path("aggregates.json"), run.result,
                             ctx.manifest.config_hash, ctx.manifest.seed);
}

void cmd_exp_remove(Ctx& ctx, const std::string& route) {
  ctx.prepare();
  const Dataset ds = ctx.load_data();
  ctx.seal();
  progress("baseline run");
  const exp::BaselineRun base = exp::run_baseline(ds, ctx.sens, ctx.cfg);
  progress("removal scenario: " + route);
  const exp::ScenarioResult s =
      exp::run_single_removal(ds, base, route, ctx.sens, ctx.cfg);
  exp::write_scenario_json(ctx.path("scenario_result.json"), s,
                           ctx.manifest.config_hash, ctx.manifest.seed);
  progress("overall dD " + csv::format_double(s.overall_delta_d) +
           ", failure rate " + csv::format_double(s.failure_rate));
}

void cmd_exp_sweep(Ctx& ctx, const std::string& dimension,
                   const std::string& coefficients_path, bool dynamic) {
  ctx.prepare();
  const Dataset ds = ctx.load_data();
  ctx.inputs.push_back(coefficients_path);
  const feat::Coefficients coeffs = cfgio::load_coefficients(coefficients_path);
  const auto dim = coeffs.find(dimension);
  if (dim == coeffs.end()) {
    throw ValidationError(coefficients_path + ": no coefficients for dimension '" +
                          dimension + "'");
  }
  ctx.seal();

  progress("baseline run");
  const exp::BaselineRun base = exp::run_baseline(ds, ctx.sens, ctx.cfg);
  const auto features =
      feat::compute_route_features(base.network, ds, base.plans, ctx.cfg);
  std::vector<std::string> warnings;
  const auto scores = feat::score_routes(features, dimension, dim->second, &warnings);
  feat::write_features_csv(ctx.path("features.csv"), features, ctx.meta());
  feat::write_scores_csv(ctx.path("scores.csv"), scores, ctx.meta());
  for (const std::string& w : warnings) progress("warning: " + w);

  progress("sweep over dimension " + dimension +
           (dynamic ? " (dynamic ranking)" : " (static ranking)"));
  const exp::SweepCurve curve = exp::run_sweep(ds, dimension, coeffs, ctx.sens,
                                               ctx.cfg, dynamic, ctx.jobs, &base);
  exp::write_sweep_csv(ctx.path("sweep_curve.csv"), curve, ctx.meta());
  progress("removed " + std::to_string(curve.removal_order.size()) +
           " routes, final failure rate " +
           csv::format_double(curve.points.back().failure_rate));
}

void cmd_exp_ofat(Ctx& ctx, const std::string& scenario, double magnitude) {
  ctx.prepare();
  const Dataset ds = ctx.load_data();
  ctx.seal();
  progress("baseline run");
  const exp::BaselineRun base = exp::run_baseline(ds, ctx.sens, ctx.cfg);
  progress("ofat scenario " + scenario + " x" + csv::format_double(magnitude));
  const exp::OfatReport rep =
      exp::run_ofat(ds, base, scenario, magnitude, ctx.sens, ctx.cfg);
  exp::write_ofat_json(ctx.path("ofat_report.json"), rep,
                       ctx.manifest.config_hash, ctx.manifest.seed);
  progress(std::string("ranking check: ") + (rep.pass ? "pass" : "fail") +
           (rep.note.empty() ? "" : " (" + rep.note + ")"));
}

void cmd_exp_perturb(Ctx& ctx, int samples, double global_range,
                     double individual_range, bool full) {
  ctx.prepare();
  const Dataset ds = ctx.load_data();
  ctx.seal();
  progress("baseline run");
  const exp::BaselineRun base = exp::run_baseline(ds, ctx.sens, ctx.cfg);
  progress(std::to_string(samples) + " perturbation samples, " +
           (full ? "full re-simulation" : "fast re-scoring"));
  const exp::PerturbationReport rep =
      exp::run_perturbation(ds, base, ctx.sens, ctx.cfg, samples, global_range,
                            individual_range, !full, ctx.cfg.rng_seed, ctx.jobs);
  exp::write_perturbation_csv(ctx.path("perturbation.csv"), rep, ctx.meta());
  exp::write_perturbation_json(ctx.path("perturbation_summary.json"), rep,
                               ctx.manifest.config_hash, ctx.manifest.seed);
  progress("rank retention " + csv::format_double(rep.retention_rate));
}

const char* p_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

void cmd_stats_regress(Ctx& ctx, const std::string& table_path,
                       const std::string& target, bool raw) {
  ctx.prepare();
  ctx.inputs.push_back(table_path);
  ctx.seal();
  const csv::Table table = csv::read_file(table_path);
  const int c_y = table.require_column(target);
  std::vector<double> y(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) y[r] = table.number(r, c_y);

  // per-dimension regressions on that dimension's feature block, X (and y
  // unless --raw) z-scored
  const feat::Coefficients blocks = feat::default_coefficients();
  nlohmann::json dims;
  for (const std::string& dname : feat::dimension_names()) {
    const auto& block = blocks.at(dname);
    std::vector<std::vector<double>> x;
    std::vector<std::string> names;
    for (const auto& [fname, unused] : block) {
      (void)unused;
      const int c = table.require_column(fname);
      std::vector<double> col(table.rows.size());
      for (size_t r = 0; r < table.rows.size(); ++r) col[r] = table.number(r, c);
      x.push_back(raw ? col : stats::zscore(col));
      names.push_back(fname);
    }
    const stats::RegressionResult res = stats::ols(x, y, !raw);
    nlohmann::json jd;
    jd["n"] = res.n;
    jd["r_squared"] = res.r_squared;
    jd["f_stat"] = res.f_stat;
    jd["f_p_value"] = res.f_p_value;
    jd["f_stars"] = p_stars(res.f_p_value);
    jd["intercept"] = res.intercept;
    jd["intercept_p_value"] = res.intercept_p_value;
    for (size_t k = 0; k < names.size(); ++k) {
      jd["coefficients"][names[k]] = {{"b", res.coefficients[k]},
                                      {"p", res.coef_p_values[k]},
                                      {"stars", p_stars(res.coef_p_values[k])}};
    }
    dims[dname] = jd;
  }
  nlohmann::json j;
  j["config_hash"] = ctx.manifest.config_hash;
  j["seed"] = ctx.manifest.seed;
  j["target"] = target;
  j["standardized"] = !raw;
  j["dimensions"] = dims;
  std::ofstream f(ctx.path("regression_table.json"), std::ios::binary);
  f << j.dump(2) << '\n';
  progress("regressed '" + target + "' over " + std::to_string(y.size()) +
           " rows across " + std::to_string(feat::dimension_names().size()) +
           " dimensions");
}

void cmd_validate_compare(Ctx& ctx, const std::string& sim_path,
                          const std::string& ref_path) {
  ctx.prepare();
  ctx.inputs.push_back(sim_path);
  ctx.inputs.push_back(ref_path);
  ctx.seal();
  const auto sim_outcomes = exp::read_outcomes_csv(sim_path);
  const auto ref_outcomes = exp::read_outcomes_csv(ref_path);
  const exp::ValidationReport rep =
      exp::validate_distributions(sim_outcomes, ref_outcomes, ctx.cfg);
  exp::write_validation_json(ctx.path("validation_report.json"), rep,
                             ctx.manifest.config_hash, ctx.manifest.seed);
  progress("trip time: KS " + csv::format_double(rep.trip_time.ks) + ", TV " +
           csv::format_double(rep.trip_time.tv) + "; transfers: KS " +
           csv::format_double(rep.transfers.ks) + ", TV " +
           csv::format_double(rep.transfers.tv));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bus network simulator: group-level dissatisfaction under route removal"};
  app.require_subcommand(1);
  Ctx ctx;

  // gen synth
  auto* gen = app.add_subcommand("gen", "generate inputs");
  gen->require_subcommand(1);
  auto* synth_cmd = gen->add_subcommand("synth", "synthetic network + demand");
  std::string topology = "grid", mix;
  int g_routes = 10, g_stops = 40, g_trips = 2000;
  double peak = -1.0;
  synth_cmd->add_option("--topology", topology, "grid | hub_spoke")
      ->capture_default_str();
  synth_cmd->add_option("--routes", g_routes, "route count")->capture_default_str();
  synth_cmd->add_option("--stops", g_stops, "stop count")->capture_default_str();
  synth_cmd->add_option("--trips", g_trips, "trip count")->capture_default_str();
  synth_cmd->add_option("--mix", mix, "General,Student,Elderly,Disabled shares");
  synth_cmd->add_option("--peak", peak, "peak-hour departure share (0..1)");
  add_common(synth_cmd, ctx);
  synth_cmd->callback(
      [&] { cmd_gen_synth(ctx, topology, g_routes, g_stops, g_trips, mix, peak); });

  // net build
  auto* net_cmd = app.add_subcommand("net", "network construction");
  net_cmd->require_subcommand(1);
  auto* build = net_cmd->add_subcommand("build", "build graph, emit edges + metrics");
  build->add_option("--data", ctx.data_dir, "dataset directory")->required();
  add_common(build, ctx);
  build->callback([&] { cmd_net_build(ctx); });

  // sim baseline
  auto* sim_cmd = app.add_subcommand("sim", "simulation");
  sim_cmd->require_subcommand(1);
  auto* baseline = sim_cmd->add_subcommand("baseline", "full day on the unmodified network");
  baseline->add_option("--data", ctx.data_dir, "dataset directory")->required();
  add_common(baseline, ctx);
  baseline->callback([&] { cmd_sim_baseline(ctx); });

  // exp remove | sweep | ofat | perturb
  auto* expc = app.add_subcommand("exp", "experiments");
  expc->require_subcommand(1);

  auto* remove = expc->add_subcommand("remove", "single-route removal vs baseline");
  std::string route;
  remove->add_option("--data", ctx.data_dir, "dataset directory")->required();
  remove->add_option("--route", route, "route id to remove")->required();
  add_common(remove, ctx);
  remove->callback([&] { cmd_exp_remove(ctx, route); });

  auto* sweep = expc->add_subcommand("sweep", "progressive removal curve");
  std::string dimension, coefficients_path;
  bool dynamic = false;
  sweep->add_option("--data", ctx.data_dir, "dataset directory")->required();
  sweep->add_option("--dimension", dimension, "capacity | structure | function")
      ->required();
  sweep->add_option("--coefficients", coefficients_path,
                    "feature weight JSON (see configs/coefficients_default.json)")
      ->required();
  sweep->add_flag("--dynamic", dynamic, "re-rank surviving routes each step");
  add_common(sweep, ctx);
  sweep->callback([&] { cmd_exp_sweep(ctx, dimension, coefficients_path, dynamic); });

  auto* ofat = expc->add_subcommand("ofat", "one-factor-at-a-time ranking check");
  std::string scenario;
  double magnitude = 2.0;
  ofat->add_option("--data", ctx.data_dir, "dataset directory")->required();
  ofat->add_option("--scenario", scenario, "WAIT+ | TIME+ | CROWD+ | XFER+")
      ->required();
  ofat->add_option("--magnitude", magnitude, "driver multiplier")->required();
  add_common(ofat, ctx);
  ofat->callback([&] { cmd_exp_ofat(ctx, scenario, magnitude); });

  auto* perturb = expc->add_subcommand("perturb", "sensitivity-weight perturbation");
  int samples = 600;
  double global_range = 0.15, individual_range = 0.10;
  bool full = false;
  perturb->add_option("--data", ctx.data_dir, "dataset directory")->required();
  perturb->add_option("--samples", samples, "sample count")->capture_default_str();
  perturb->add_option("--global-range", global_range, "global factor half-width")
      ->capture_default_str();
  perturb->add_option("--individual-range", individual_range,
                      "per-weight factor half-width")
      ->capture_default_str();
  perturb->add_flag("--full", full, "re-plan and re-simulate every sample");
  add_common(perturb, ctx);
  perturb->callback(
      [&] { cmd_exp_perturb(ctx, samples, global_range, individual_range, full); });

  // stats regress
  auto* statsc = app.add_subcommand("stats", "statistics utilities");
  statsc->require_subcommand(1);
  auto* regress = statsc->add_subcommand(
      "regress", "per-dimension feature regressions on a target column");
  std::string table_path, target;
  bool raw = false;
  regress->add_option("--table", table_path, "CSV with feature columns + target")
      ->required();
  regress->add_option("--target", target, "target column name")->required();
  regress->add_flag("--raw", raw, "skip z-scoring of X and y");
  add_common(regress, ctx);
  regress->callback([&] { cmd_stats_regress(ctx, table_path, target, raw); });

  // validate compare
  auto* validate = app.add_subcommand("validate", "distribution comparison");
  validate->require_subcommand(1);
  auto* compare = validate->add_subcommand(
      "compare", "KS/TV + KDE between two outcomes.csv files");
  std::string sim_path, ref_path;
  compare->add_option("--sim", sim_path, "simulated outcomes.csv")->required();
  compare->add_option("--ref", ref_path, "reference outcomes.csv")->required();
  add_common(compare, ctx);
  compare->callback([&] { cmd_validate_compare(ctx, sim_path, ref_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
