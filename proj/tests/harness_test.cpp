#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "geepc/config.hpp"
#include "geepc/errors.hpp"
#include "geepc/experiment.hpp"
#include "geepc/report.hpp"
#include "support.hpp"

using namespace geepc;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.snapshots = 12;
  c.target_sinr_db = {-18.0, -10.0};
  c.master_seed = 2024;
  c.workers = 2;
  return c;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("geepc_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(R"(
# defaults with a few overrides
[cell]
radius_m = 150
ue_count = 4

[radio]
max_power_dbm = 20
noise_power_dbm = -110

[experiment]
target_sinr_db = -20, -15.5, -9
snapshots = 7
seed = 99
algorithms = tpc, proposed
delta_policy = per_configuration

[iteration]
tolerance = 1e-4

[solver]
random_starts = 3

[dtpc]
opportunism_scale = 0.5
)");
  CHECK(c.geometry.radius_m == 150.0);
  CHECK(c.ue_count == 4);
  CHECK(c.radio.max_power_dbm == 20.0);
  CHECK(c.target_sinr_db == std::vector<double>{-20.0, -15.5, -9.0});
  CHECK(c.snapshots == 7);
  CHECK(c.master_seed == 99);
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::tpc, Algorithm::proposed});
  CHECK(c.delta_policy == DeltaPolicy::per_configuration);
  CHECK(c.iteration.tolerance == 1e-4);
  CHECK(c.solver.random_starts == 3);
  CHECK(c.opportunism_scale == 0.5);
  CHECK(c.geometry.pl0_db == CellGeometry{}.pl0_db);

  SUBCASE("format round trip") {
    const auto again = parse_config(format_config(c));
    CHECK(format_config(again) == format_config(c));
    CHECK(again.target_sinr_db == c.target_sinr_db);
    CHECK(again.iteration.tolerance == c.iteration.tolerance);
  }
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[cell]\nradius = 100\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[cell]\nradius_m = wide\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nsnapshots = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nalgorithms = greedy\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\ndelta_policy = sometimes\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/geepc.ini"), ConfigError);
  CHECK_THROWS_AS(parse_output_format("xml"), ConfigError);
  CHECK(parse_output_format("csv+svg") == OutputFormat::csv_svg);
  CHECK(parse_algorithm_list("dtpc,tpc,dtpc") == std::vector<Algorithm>{Algorithm::dtpc, Algorithm::tpc});
}

TEST_CASE("run_snapshot") {
  const auto c = small_config();
  const auto a = run_snapshot(c, -12.0, 77);
  const auto b = run_snapshot(c, -12.0, 77);
  REQUIRE(a.status == SnapshotStatus::ok);
  REQUIRE(a.runs.size() == 3);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].algorithm == c.algorithms[i]);
    CHECK(a.runs[i].trace.final_power() == b.runs[i].trace.final_power());
    CHECK(a.runs[i].trace.iterations_used == b.runs[i].trace.iterations_used);
  }
  REQUIRE(a.centralized.has_value());
  CHECK(a.centralized->q_star == b.centralized->q_star);

  SUBCASE("fixed-target only skips the centralized solve") {
    auto tpc_only = c;
    tpc_only.algorithms = {Algorithm::tpc};
    const auto r = run_snapshot(tpc_only, -12.0, 77);
    CHECK(r.status == SnapshotStatus::ok);
    CHECK_FALSE(r.t_max.has_value());
    CHECK_FALSE(r.centralized.has_value());
    CHECK(r.runs.size() == 1);
  }
  SUBCASE("infeasible targets are reported, not thrown") {
    const auto r = run_snapshot(c, 0.0, 77);
    CHECK(r.status == SnapshotStatus::infeasible);
    CHECK(r.runs.empty());
    CHECK_FALSE(r.message.empty());
  }
}

TEST_CASE("a single-snapshot experiment is run_snapshot") {
  auto c = small_config();
  c.snapshots = 1;
  c.target_sinr_db = {-14.0};
  const auto report = run_experiment(c);
  const auto single = run_snapshot(c, -14.0, derive_seed(c.master_seed, 0));
  REQUIRE(single.status == SnapshotStatus::ok);
  REQUIRE(report.rows.size() == 4);
  for (std::size_t a = 0; a < single.runs.size(); ++a) {
    const auto& m = single.runs[a].trace.final_step().metrics;
    CHECK(report.rows[a].algorithm == to_string(single.runs[a].algorithm));
    CHECK(report.rows[a].mean_gee == m.gee);
    CHECK(report.rows[a].mean_throughput == m.total_throughput);
    CHECK(report.rows[a].mean_total_power_w == m.total_power);
    CHECK(report.rows[a].mean_iterations ==
          static_cast<double>(single.runs[a].trace.iterations_used));
  }
  CHECK(report.rows[3].algorithm == "centralized");
  CHECK(report.rows[3].mean_gee == single.centralized->q_star);
}

TEST_CASE("experiment aggregation") {
  const auto c = small_config();
  const auto report = run_experiment(c);
  REQUIRE(report.rows.size() == 2 * 4);
  CHECK_FALSE(report.all_empty());

  // Counts reconcile and every skipped snapshot is skipped at every target.
  for (const auto& r : report.rows) {
    CHECK(r.snapshots_used + r.snapshots_skipped == c.snapshots);
    CHECK(r.snapshots_used == report.rows.front().snapshots_used);
  }
  CHECK(report.infeasible + report.solver_failures ==
        c.target_sinr_db.size() * report.rows.front().snapshots_skipped);

  // Re-aggregate the per-snapshot rows after a CSV round trip.
  std::stringstream snap_csv, exp_csv;
  write_snapshot_csv(snap_csv, report.snapshot_rows);
  write_experiment_csv(exp_csv, report.rows);
  const auto snaps = read_snapshot_csv(snap_csv);
  const auto rows = read_experiment_csv(exp_csv);
  CHECK(snaps == report.snapshot_rows);
  CHECK(rows == report.rows);

  std::map<std::pair<double, std::string>, std::array<double, 5>> acc;
  for (const auto& s : snaps) {
    auto& a = acc[{s.target_sinr_db, s.algorithm}];
    a[0] += s.gee;
    a[1] += s.total_throughput;
    a[2] += s.total_power_w;
    a[3] += static_cast<double>(s.iterations);
    a[4] += 1.0;
  }
  for (const auto& r : rows) {
    const auto& a = acc.at({r.target_sinr_db, r.algorithm});
    CHECK(a[4] == static_cast<double>(r.snapshots_used));
    CHECK(testing::rel_err(a[0] / a[4], r.mean_gee) < 1e-12);
    CHECK(testing::rel_err(a[1] / a[4], r.mean_throughput) < 1e-12);
    CHECK(testing::rel_err(a[2] / a[4], r.mean_total_power_w) < 1e-12);
    CHECK(testing::rel_err(a[3] / a[4], r.mean_iterations) < 1e-12);
  }
}

TEST_CASE("results do not depend on the worker count") {
  auto c = small_config();
  c.workers = 1;
  const auto serial = run_experiment(c);
  for (std::size_t w : {3u, 8u}) {
    c.workers = w;
    const auto parallel = run_experiment(c);
    CHECK(parallel.rows == serial.rows);
    CHECK(parallel.snapshot_rows == serial.snapshot_rows);
  }
}

TEST_CASE("per-configuration delta") {
  auto c = small_config();
  c.delta_policy = DeltaPolicy::per_configuration;
  const auto report = run_experiment(c);
  for (const auto& r : report.rows) {
    if (r.snapshots_used > 0) CHECK(r.mean_gee > 0.0);
  }
}

TEST_CASE("convergence report") {
  auto c = small_config();
  c.snapshots = 6;
  const auto report = run_convergence(c, -12.0);
  REQUIRE(report.snapshots_used > 0);
  CHECK(report.mean_iterations.size() == c.algorithms.size());
  std::map<std::string, std::size_t> count;
  for (const auto& p : report.points) ++count[p.algorithm];
  CHECK(count.size() == 3);

  std::stringstream csv;
  write_convergence_csv(csv, report.points);
  CHECK(read_convergence_csv(csv) == report.points);
}

TEST_CASE("csv format") {
  std::stringstream exp, conv, snap;
  write_experiment_csv(exp, {});
  write_convergence_csv(conv, {});
  write_snapshot_csv(snap, {});
  CHECK(exp.str() ==
        "algorithm,target_sinr_db,mean_gee,mean_throughput,mean_total_power_w,mean_iterations,"
        "snapshots_used,snapshots_skipped\n");
  CHECK(conv.str() == "algorithm,iteration,gee,total_throughput,total_power_w\n");
  CHECK(snap.str().rfind("target_sinr_db,snapshot,seed,algorithm,", 0) == 0);

  const std::vector<ReportRow> rows{
      {"proposed", -16.0, 0.1 + 0.2, 1.0 / 3.0, 5e-324, 19.95, 190, 10},
      {"tpc", -8.0, 1e300, 2.0 / 7.0, 0.0, 6.0, 0, 200}};
  std::stringstream out;
  write_experiment_csv(out, rows);
  CHECK(read_experiment_csv(out) == rows);

  std::stringstream bad("algorithm,gee\nx,1\n");
  CHECK_THROWS_AS(read_experiment_csv(bad), IoError);
  std::stringstream truncated(std::string(kExperimentHeader) + "\nproposed,-16,0.3\n");
  CHECK_THROWS_AS(read_experiment_csv(truncated), IoError);
}

TEST_CASE("plots and emitted files") {
  auto c = small_config();
  c.snapshots = 4;
  const auto report = run_experiment(c);

  const auto series = gee_vs_target_series(report.rows);
  CHECK(series.size() == 4);
  const auto svg = render_line_plot("GEE", "target SINR (dB)", "GEE", series);
  std::size_t polylines = 0;
  for (auto pos = svg.find("<polyline class=\"series\""); pos != std::string::npos;
       pos = svg.find("<polyline class=\"series\"", pos + 1)) {
    ++polylines;
  }
  CHECK(polylines == series.size());
  CHECK(svg.rfind("<svg", 0) == 0);

  const auto dir = scratch("emit");
  emit_report(report, OutputFormat::csv_svg, dir);
  CHECK(fs::exists(dir / "experiment.csv"));
  CHECK(fs::exists(dir / "snapshots.csv"));
  CHECK(fs::exists(dir / "gee_vs_target.svg"));
  std::ifstream in(dir / "experiment.csv");
  CHECK(read_experiment_csv(in) == report.rows);

  const auto csv_only = scratch("emit_csv");
  emit_report(report, OutputFormat::csv, csv_only);
  CHECK_FALSE(fs::exists(csv_only / "gee_vs_target.svg"));
  CHECK(slurp(csv_only / "experiment.csv") == slurp(dir / "experiment.csv"));

  // A regular file where the output directory should go.
  const auto blocker = scratch("blocked");
  { std::ofstream(blocker) << "x"; }
  CHECK_THROWS_AS(emit_report(report, OutputFormat::csv, blocker), IoError);
  CHECK_THROWS_AS(emit_report(report, OutputFormat::csv, blocker / "sub"), IoError);
  fs::remove_all(blocker);
  fs::remove_all(dir);
  fs::remove_all(csv_only);
}

TEST_CASE("shipped configs") {
  const fs::path dir = GEEPC_CONFIG_DIR;
  CHECK(format_config(load_config(dir / "default.ini")) == format_config(ExperimentConfig{}));
  const auto ci = load_config(dir / "ci.ini");
  CHECK(ci.snapshots == 200);
  const auto conv = load_config(dir / "convergence.ini");
  CHECK(conv.iteration.tolerance == 1e-4);
  CHECK(conv.target_sinr_db == std::vector<double>{-15.0, -10.0});
}
