#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "busim/engine.hpp"
#include "busim/features.hpp"
#include "busim/network.hpp"
#include "busim/planner.hpp"
#include "busim/statkit.hpp"
#include "busim/types.hpp"

namespace busim::exp {

// build -> plan -> simulate on the unmodified dataset
struct BaselineRun {
  net::Network network;
  std::vector<plan::TripPlan> plans;
  sim::SimResult result;
};

BaselineRun run_baseline(const Dataset& ds, const SensitivitySet& sens,
                         const SimConfig& cfg);

struct ScenarioResult {
  std::string scenario_id;
  std::vector<std::string> removed_routes;
  std::array<double, kGroupCount> mean_d{};  // NaN where a group completed none
  double overall_d = 0.0;
  double failure_rate = 0.0;
  double mean_waiting_min = 0.0;
  double mean_load_ratio = 0.0;
  std::array<double, kGroupCount> delta_d{};  // vs baseline, completed trips
  double overall_delta_d = 0.0;
};

ScenarioResult run_single_removal(const Dataset& ds, const BaselineRun& baseline,
                                  const std::string& route_id,
                                  const SensitivitySet& sens,
                                  const SimConfig& cfg,
                                  sim::SimResult* scenario_out = nullptr);

struct SweepPoint {
  int step = 0;                // 0 = baseline
  std::string removed_route;   // empty for the baseline point
  double overall_d = 0.0;
  std::array<double, kGroupCount> mean_d{};
  double failure_rate = 0.0;
};

struct SweepCurve {
  std::string dimension;
  std::vector<SweepPoint> points;  // baseline plus ceil(0.6 R) removals
  std::vector<std::string> removal_order;
  std::vector<std::string> warnings;
};

// Removal order: ascending feature score on the baseline network (static
// mode, the default); dynamic mode re-scores the surviving network before
// each removal. Static sweep steps are independent and honor `jobs`.
// Pass a precomputed baseline to avoid simulating it twice.
SweepCurve run_sweep(const Dataset& ds, const std::string& dimension,
                     const feat::Coefficients& coefficients,
                     const SensitivitySet& sens, const SimConfig& cfg,
                     bool dynamic_ranking = false, int jobs = 1,
                     const BaselineRun* baseline = nullptr);

struct OfatGroupRow {
  double baseline_d = 0.0;
  double scenario_d = 0.0;
  double baseline_w_min = 0.0;
  double scenario_w_min = 0.0;
  // relative response of the group's own mean D
  double elasticity = 0.0;
  // response measured against the pooled baseline mean D, so values are
  // comparable across groups; the ranking test uses this column
  double elasticity_pooled_base = 0.0;
};

struct OfatReport {
  std::string scenario;
  double magnitude = 1.0;
  std::string driver;           // which β column the ranking is tested against
  std::array<OfatGroupRow, kGroupCount> rows;
  std::array<double, kGroupCount> expected_beta{};
  stats::RankTestResult spearman;
  bool low_signal = false;
  bool pass = false;
  std::string note;
  double baseline_load_ratio = 0.0;
  std::vector<std::string> adjusted_routes;  // XFER+: connecting routes
};

OfatReport run_ofat(const Dataset& ds, const BaselineRun& baseline,
                    const std::string& scenario, double magnitude,
                    const SensitivitySet& sens, const SimConfig& cfg);

struct PerturbationSample {
  double global_factor = 1.0;
  std::array<double, kGroupCount * 4> weight_factors{};
  std::array<double, kGroupCount> mean_d{};
  double tau = 1.0;
  bool retained = true;
};

struct PerturbationReport {
  int n_samples = 0;
  bool fast_mode = true;
  std::array<double, kGroupCount> baseline_mean_d{};
  std::vector<PerturbationSample> samples;
  double retention_rate = 1.0;
  // standardized (pooled z-score) quartiles per group, and the gaps between
  // adjacent groups' interquartile boxes
  std::array<double, kGroupCount> z_q25{};
  std::array<double, kGroupCount> z_q75{};
  double iqr_gap_elderly_student = 0.0;
  double iqr_gap_disabled_general = 0.0;
};

PerturbationReport run_perturbation(const Dataset& ds, const BaselineRun& baseline,
                                    const SensitivitySet& sens, const SimConfig& cfg,
                                    int n_samples, double global_range,
                                    double individual_range, bool fast_mode,
                                    uint64_t seed, int jobs = 1);

struct DistributionComparison {
  double ks = 0.0;
  double tv = 0.0;
};

struct ValidationReport {
  DistributionComparison trip_time;  // minutes spent waiting + riding
  DistributionComparison transfers;
  std::vector<double> kde_grid;
  std::vector<double> kde_sim;
  std::vector<double> kde_ref;
  std::vector<long long> transfer_bins;
  std::vector<double> transfer_mass_sim;
  std::vector<double> transfer_mass_ref;
};

ValidationReport validate_distributions(const std::vector<sim::TripOutcome>& sim_outcomes,
                                        const std::vector<sim::TripOutcome>& ref_outcomes,
                                        const SimConfig& cfg);

// ---- result writers (meta goes into a comment line / JSON fields) ----
void write_outcomes_csv(const std::string& path, const Dataset& ds,
                        const std::vector<sim::TripOutcome>& outcomes,
                        const std::string& meta_comment);
std::vector<sim::TripOutcome> read_outcomes_csv(const std::string& path);
void write_aggregates_json(const std::string& path, const sim::SimResult& result,
                           const std::string& config_hash, uint64_t seed);
void write_scenario_json(const std::string& path, const ScenarioResult& s,
                         const std::string& config_hash, uint64_t seed);
void write_sweep_csv(const std::string& path, const SweepCurve& curve,
                     const std::string& meta_comment);
void write_ofat_json(const std::string& path, const OfatReport& r,
                     const std::string& config_hash, uint64_t seed);
void write_perturbation_csv(const std::string& path, const PerturbationReport& r,
                            const std::string& meta_comment);
void write_perturbation_json(const std::string& path, const PerturbationReport& r,
                             const std::string& config_hash, uint64_t seed);
void write_validation_json(const std::string& path, const ValidationReport& r,
                           const std::string& config_hash, uint64_t seed);

}  // namespace busim::exp
