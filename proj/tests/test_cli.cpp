#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "busim/csv.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() { return BUSIM_CLI_PATH; }
std::string config_dir() { return BUSIM_CONFIG_DIR; }

int run(const std::string& args, const std::string& stderr_to = "/dev/null") {
  const std::string cmd =
      cli() + " " + args + " > /dev/null 2> " + stderr_to;
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::json load_json(const fs::path& p) {
  return nlohmann::json::parse(slurp(p));
}

// fresh working area per test case
fs::path arena(const std::string& name) {
  const fs::path root = fs::temp_directory_path() / "busim_cli_suite" / name;
  fs::remove_all(root);
  fs::create_directories(root);
  return root;
}

std::string gen_small(const fs::path& dir, uint64_t seed) {
  const int rc = run("gen synth --topology grid --routes 6 --stops 24 "
                     "--trips 250 --seed " + std::to_string(seed) +
                     " --out " + dir.string());
  REQUIRE(rc == 0);
  return dir.string();
}

// data rows only: skip "#" meta lines and the header
size_t csv_rows(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::string line;
  size_t n = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++n;
  }
  return n;
}

std::string first_route_id(const fs::path& data_dir) {
  const busim::csv::Table t =
      busim::csv::read_file((data_dir / "routes.csv").string());
  const int col = t.require_column("route_id");
  REQUIRE(!t.rows.empty());
  return t.cell(0, col);
}

}  // namespace

TEST_CASE("gen synth is deterministic for a fixed seed") {
  const fs::path root = arena("gen_determinism");
  gen_small(root / "a", 7);
  gen_small(root / "b", 7);
  for (const char* f : {"stops.csv", "routes.csv", "trips.csv", "pois.csv"}) {
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  }
  CHECK(fs::exists(root / "a" / "manifest.json"));

  // a different seed must actually change the demand
  gen_small(root / "c", 8);
  CHECK(slurp(root / "a" / "trips.csv") != slurp(root / "c" / "trips.csv"));

  const int rc = run("gen synth --topology hub_spoke --routes 8 --stops 30 "
                     "--trips 100 --seed 1 --out " + (root / "hub").string());
  CHECK(rc == 0);
  CHECK(fs::exists(root / "hub" / "routes.csv"));
}

TEST_CASE("sim baseline writes results and never mutates its inputs") {
  const fs::path root = arena("sim_baseline");
  const std::string data = gen_small(root / "data", 3);

  std::vector<std::pair<std::string, std::string>> before;
  for (const auto& e : fs::directory_iterator(data)) {
    before.emplace_back(e.path().string(), slurp(e.path()));
  }

  const int rc = run("sim baseline --data " + data + " --seed 11 --out " +
                     (root / "run1").string() + " --config " + config_dir() +
                     "/default.conf --sensitivity " + config_dir() +
                     "/sensitivity_default.json");
  REQUIRE(rc == 0);
  CHECK(fs::exists(root / "run1" / "outcomes.csv"));
  CHECK(fs::exists(root / "run1" / "manifest.json"));
  CHECK(csv_rows(root / "run1" / "outcomes.csv") == 250);

  const nlohmann::json agg = load_json(root / "run1" / "aggregates.json");
  CHECK(agg.at("seed").get<uint64_t>() == 11);
  CHECK(agg.at("overall").at("n_total").get<long long>() == 250);
  CHECK(agg.at("groups").contains("Disabled"));
  CHECK(agg.at("config_hash").is_string());

  for (const auto& [path, bytes] : before) {
    CHECK(slurp(path) == bytes);  // inputs untouched
  }

  // same seed, second run: byte-identical results (manifest may differ by
  // its timestamp, so it is not compared)
  const int rc2 = run("sim baseline --data " + data + " --seed 11 --out " +
                      (root / "run2").string() + " --config " + config_dir() +
                      "/default.conf --sensitivity " + config_dir() +
                      "/sensitivity_default.json");
  REQUIRE(rc2 == 0);
  CHECK(slurp(root / "run1" / "outcomes.csv") ==
        slurp(root / "run2" / "outcomes.csv"));
  CHECK(slurp(root / "run1" / "aggregates.json") ==
        slurp(root / "run2" / "aggregates.json"));
}

TEST_CASE("net build emits edges and topology metrics") {
  const fs::path root = arena("net_build");
  const std::string data = gen_small(root / "data", 5);
  const int rc =
      run("net build --data " + data + " --out " + (root / "net").string());
  REQUIRE(rc == 0);
  CHECK(fs::exists(root / "net" / "edges.csv"));
  const nlohmann::json m = load_json(root / "net" / "network_metrics.json");
  CHECK(m.at("density").get<double>() > 0.0);
  CHECK(m.at("avg_path_length").get<double>() >= 1.0);
  CHECK(m.at("active_stops").get<long long>() > 0);
}

TEST_CASE("missing required flags exit with code one") {
  const fs::path root = arena("bad_flags");
  CHECK(run("sim baseline --out " + (root / "x").string()) == 1);
  CHECK(run("exp sweep --data nowhere --dimension capacity --out " +
            (root / "y").string()) == 1);
  CHECK(run("definitely-not-a-command") == 1);
}

TEST_CASE("unknown ofat scenario fails with a diagnostic") {
  const fs::path root = arena("bad_scenario");
  const std::string data = gen_small(root / "data", 9);
  const fs::path errfile = root / "stderr.txt";
  const int rc = run("exp ofat --data " + data +
                     " --scenario NOPE+ --magnitude 2 --out " +
                     (root / "run").string(), errfile.string());
  CHECK(rc == 1);
  CHECK(slurp(errfile).find("unknown ofat scenario 'NOPE+'") !=
        std::string::npos);
}

TEST_CASE("exp remove and exp ofat write their reports") {
  const fs::path root = arena("exp_single");
  const std::string data = gen_small(root / "data", 13);
  const std::string route = first_route_id(data);

  const int rc1 = run("exp remove --data " + data + " --route " + route +
                      " --seed 2 --out " + (root / "rm").string());
  REQUIRE(rc1 == 0);
  const nlohmann::json s = load_json(root / "rm" / "scenario_result.json");
  CHECK(s.at("scenario_id").get<std::string>() == "remove:" + route);

  const int rc2 = run("exp ofat --data " + data +
                      " --scenario WAIT+ --magnitude 2 --seed 2 --out " +
                      (root / "ofat").string());
  REQUIRE(rc2 == 0);
  const nlohmann::json o = load_json(root / "ofat" / "ofat_report.json");
  CHECK(o.at("driver").get<std::string>() == "beta_W");
  CHECK(o.at("scenario").get<std::string>() == "WAIT+");
}

TEST_CASE("exp sweep produces the curve plus feature and score tables") {
  const fs::path root = arena("exp_sweep");
  const std::string data = gen_small(root / "data", 17);
  const int rc = run("exp sweep --data " + data +
                     " --dimension capacity --coefficients " + config_dir() +
                     "/coefficients_default.json --seed 4 --out " +
                     (root / "sweep").string());
  REQUIRE(rc == 0);
  // baseline point plus ceil(0.6 * 6) removal steps
  CHECK(csv_rows(root / "sweep" / "sweep_curve.csv") == 5);
  CHECK(csv_rows(root / "sweep" / "features.csv") == 6);
  CHECK(csv_rows(root / "sweep" / "scores.csv") == 6);
}

TEST_CASE("exp perturb summarizes retention") {
  const fs::path root = arena("exp_perturb");
  const std::string data = gen_small(root / "data", 21);
  const int rc = run("exp perturb --data " + data +
                     " --samples 20 --seed 6 --out " +
                     (root / "pert").string());
  REQUIRE(rc == 0);
  CHECK(csv_rows(root / "pert" / "perturbation.csv") == 20);
  const nlohmann::json p = load_json(root / "pert" / "perturbation_summary.json");
  CHECK(p.at("n_samples").get<int>() == 20);
  const double r = p.at("retention_rate").get<double>();
  CHECK(r >= 0.0);
  CHECK(r <= 1.0);
}

TEST_CASE("validate compare of a run against itself reports zero distance") {
  const fs::path root = arena("validate_self");
  const std::string data = gen_small(root / "data", 23);
  REQUIRE(run("sim baseline --data " + data + " --seed 1 --out " +
              (root / "run").string()) == 0);
  const std::string outcomes = (root / "run" / "outcomes.csv").string();
  const int rc = run("validate compare --sim " + outcomes + " --ref " +
                     outcomes + " --out " + (root / "val").string());
  REQUIRE(rc == 0);
  const nlohmann::json v = load_json(root / "val" / "validation_report.json");
  CHECK(v.at("trip_time").at("ks").get<double>() == 0.0);
  CHECK(v.at("trip_time").at("tv").get<double>() == 0.0);
  CHECK(v.at("transfers").at("ks").get<double>() == 0.0);
  CHECK(v.at("transfers").at("tv").get<double>() == 0.0);
}

TEST_CASE("stats regress fits every dimension block of a feature table") {
  const fs::path root = arena("stats_regress");
  const fs::path table = root / "table.csv";
  {
    std::ofstream f(table);
    f << "route_id,ridership,density,avg_betweenness,avg_path_length,"
         "sparse_station_ratio,amenity_entropy,delta_d\n";
    // ten rows with plenty of independent variation
    const double rows[10][7] = {
        {120, 0.30, 4.2, 2.9, 0.10, 0.8, 1.31},
        {80, 0.22, 2.1, 3.4, 0.30, 1.2, 1.02},
        {200, 0.41, 6.8, 2.2, 0.00, 1.9, 1.88},
        {45, 0.15, 1.0, 4.1, 0.55, 0.3, 0.61},
        {150, 0.37, 5.5, 2.5, 0.05, 1.5, 1.59},
        {95, 0.28, 3.3, 3.1, 0.20, 0.9, 1.13},
        {60, 0.19, 1.8, 3.8, 0.40, 0.6, 0.83},
        {175, 0.39, 6.1, 2.4, 0.02, 1.7, 1.72},
        {110, 0.31, 4.0, 2.8, 0.15, 1.1, 1.27},
        {70, 0.24, 2.6, 3.5, 0.35, 0.5, 0.94}};
    for (const auto& r : rows) {
      f << "X," << r[0];
      for (int k = 1; k < 7; ++k) f << ',' << r[k];
      f << '\n';
    }
  }
  const int rc = run("stats regress --table " + table.string() +
                     " --target delta_d --out " + (root / "reg").string());
  REQUIRE(rc == 0);
  const nlohmann::json j = load_json(root / "reg" / "regression_table.json");
  CHECK(j.at("standardized").get<bool>());
  for (const char* dim : {"capacity", "structure", "function"}) {
    const auto& block = j.at("dimensions").at(dim);
    CHECK(block.at("n").get<int>() == 10);
    CHECK(block.at("r_squared").get<double>() >= 0.0);
    CHECK(block.contains("coefficients"));
  }
  CHECK(j.at("dimensions").at("capacity").at("coefficients")
            .contains("ridership"));
}
