// geepc: command-line driver for the uplink energy-efficiency experiments.
//
//   geepc run          one target SINR, per-algorithm means     -> experiment.csv
//   geepc sweep        every configured target SINR             -> experiment.csv (+ svg)
//   geepc convergence  per-iteration GEE averaged over snapshots -> convergence.csv (+ svg)
//   geepc feasibility  maximum common target and load diagnostics
//   geepc oracle       grid cross-check of the centralized solver (k <= 3)
//
// Exit codes: 0 success, 2 config error, 3 nothing feasible, 4 solver failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "geepc/config.hpp"
#include "geepc/errors.hpp"
#include "geepc/experiment.hpp"
#include "geepc/feasibility.hpp"
#include "geepc/gee_solver.hpp"
#include "geepc/report.hpp"
#include "geepc/rng.hpp"
#include "geepc/units.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kInfeasible = 3;
constexpr int kSolverFailure = 4;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string format = "csv";
  std::string algorithms;
  std::optional<std::size_t> snapshots;
  std::optional<std::size_t> workers;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI config file (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed (overrides experiment.seed)");
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--format", o.format, "csv or csv+svg")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "csv+svg"}));
  cmd->add_option("--algorithms", o.algorithms, "comma list of proposed,tpc,dtpc");
  cmd->add_option("--snapshots", o.snapshots, "number of snapshots");
  cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
  cmd->add_flag("--quiet", o.quiet, "print nothing but errors");
}

geepc::ExperimentConfig resolve(const CommonOptions& o) {
  geepc::ExperimentConfig c =
      o.config_path.empty() ? geepc::ExperimentConfig{} : geepc::load_config(o.config_path);
  if (o.seed) c.master_seed = *o.seed;
  if (!o.algorithms.empty()) c.algorithms = geepc::parse_algorithm_list(o.algorithms);
  if (o.snapshots) c.snapshots = *o.snapshots;
  if (o.workers) c.workers = *o.workers;
  c.validate();
  return c;
}

void print_rows(const std::vector<geepc::ReportRow>& rows) {
  fmt::print("{:>12} {:>10} {:>12} {:>12} {:>14} {:>10} {:>6} {:>6}\n", "algorithm", "target_dB",
             "mean_gee", "throughput", "total_power_W", "iters", "used", "skip");
  for (const auto& r : rows) {
    fmt::print("{:>12} {:>10.2f} {:>12.6g} {:>12.6g} {:>14.6g} {:>10.2f} {:>6} {:>6}\n", r.algorithm,
               r.target_sinr_db, r.mean_gee, r.mean_throughput, r.mean_total_power_w,
               r.mean_iterations, r.snapshots_used, r.snapshots_skipped);
  }
}

int finish_experiment(const geepc::ExperimentReport& report, const CommonOptions& o) {
  geepc::emit_report(report, geepc::parse_output_format(o.format), o.out_dir);
  if (!o.quiet) {
    print_rows(report.rows);
    for (const auto& d : report.diagnostics) fmt::print(std::cerr, "note: {}\n", d);
    fmt::print("wrote {}\n", (std::filesystem::path(o.out_dir) / "experiment.csv").string());
  }
  if (report.all_empty()) {
    fmt::print(std::cerr, "error: every snapshot was skipped at every target\n");
    return report.solver_failures > 0 && report.infeasible == 0 ? kSolverFailure : kInfeasible;
  }
  if (report.solver_failures > 0) {
    fmt::print(std::cerr, "error: the centralized solver failed on {} snapshot(s)\n",
               report.solver_failures);
    return kSolverFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient uplink power control experiments"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, conv_opts, feas_opts, oracle_opts;
  std::optional<double> run_target, conv_target, feas_target, oracle_target;
  std::vector<double> sweep_targets;
  std::size_t oracle_k = 2, oracle_grid = 65;

  auto* run = app.add_subcommand("run", "run one target SINR from the config");
  add_common(run, run_opts);
  run->add_option("--target-db", run_target, "target SINR in dB (default: first configured)");

  auto* sweep = app.add_subcommand("sweep", "sweep the target SINR (GEE vs. target data)");
  add_common(sweep, sweep_opts);
  sweep->add_option("--targets", sweep_targets, "target SINRs in dB (overrides the config)")
      ->delimiter(',');

  auto* conv = app.add_subcommand("convergence", "average per-iteration trace");
  add_common(conv, conv_opts);
  conv->add_option("--target-db", conv_target, "target SINR in dB (default: first configured)");

  auto* feas = app.add_subcommand("feasibility", "maximum common target and load diagnostics");
  add_common(feas, feas_opts);
  feas->add_option("--target-db", feas_target, "target to diagnose (default: largest configured)");

  auto* oracle = app.add_subcommand("oracle", "grid cross-check of the centralized solver");
  add_common(oracle, oracle_opts);
  oracle->add_option("--k", oracle_k, "UE count (1..3)")->check(CLI::Range(1, 3))->capture_default_str();
  oracle->add_option("--grid", oracle_grid, "coarse grid points per dimension")
      ->check(CLI::Range(16, 4096))
      ->capture_default_str();
  oracle->add_option("--target-db", oracle_target, "target SINR in dB (default: first configured)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      auto c = resolve(run_opts);
      c.target_sinr_db = {run_target.value_or(c.target_sinr_db.front())};
      return finish_experiment(geepc::run_experiment(c), run_opts);
    }

    if (*sweep) {
      auto c = resolve(sweep_opts);
      if (!sweep_targets.empty()) c.target_sinr_db = sweep_targets;
      return finish_experiment(geepc::run_experiment(c), sweep_opts);
    }

    if (*conv) {
      const auto c = resolve(conv_opts);
      const double target = conv_target.value_or(c.target_sinr_db.front());
      const auto report = geepc::run_convergence(c, target);
      geepc::emit_convergence(report, geepc::parse_output_format(conv_opts.format), conv_opts.out_dir);
      if (!conv_opts.quiet) {
        fmt::print("target {} dB, {} usable snapshots\n", target, report.snapshots_used);
        for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
          fmt::print("{:>10}: mean iterations {:.2f}\n", geepc::to_string(c.algorithms[a]),
                     report.mean_iterations[a]);
        }
      }
      return report.snapshots_used == 0 ? kInfeasible : kOk;
    }

    if (*feas) {
      const auto c = resolve(feas_opts);
      const double target = feas_target.value_or(
          *std::max_element(c.target_sinr_db.begin(), c.target_sinr_db.end()));
      std::size_t feasible = 0;
      double lo = 1e300, hi = -1e300, sum = 0.0;
      if (!feas_opts.quiet) {
        fmt::print("{:>8} {:>20} {:>16} {:>16} {:>12} {:>9}\n", "snapshot", "seed", "max_target_dB",
                   "closed_form_dB", "load_denom", "feasible");
      }
      for (std::size_t i = 0; i < c.snapshots; ++i) {
        const auto seed = geepc::derive_seed(c.master_seed, i);
        const auto snap = geepc::snapshot_for(c, seed);
        const double best_db = geepc::linear_to_db(geepc::max_common_target(snap));
        const double closed_db = geepc::linear_to_db(geepc::max_common_target_closed_form(snap));
        const auto diag = geepc::diagnose(snap, geepc::uniform_targets(snap.k, target));
        feasible += diag.feasible ? 1 : 0;
        lo = std::min(lo, best_db);
        hi = std::max(hi, best_db);
        sum += best_db;
        if (!feas_opts.quiet) {
          fmt::print("{:>8} {:>20} {:>16.4f} {:>16.4f} {:>12.5g} {:>9}\n", i, seed, best_db,
                     closed_db, diag.denominator, diag.feasible ? "yes" : "no");
        }
      }
      if (!feas_opts.quiet) {
        fmt::print("max common target: mean {:.3f} dB, min {:.3f} dB, max {:.3f} dB\n",
                   sum / static_cast<double>(c.snapshots), lo, hi);
        fmt::print("target {} dB feasible on {}/{} snapshots\n", target, feasible, c.snapshots);
      }
      return feasible == 0 ? kInfeasible : kOk;
    }

    if (*oracle) {
      auto c = resolve(oracle_opts);
      c.ue_count = oracle_k;
      const double target = oracle_target.value_or(c.target_sinr_db.front());
      std::size_t agree = 0, checked = 0;
      for (std::size_t i = 0; i < c.snapshots; ++i) {
        const auto snap = geepc::snapshot_for(c, geepc::derive_seed(c.master_seed, i));
        const auto gamma = geepc::uniform_targets(snap.k, target);
        if (!geepc::is_feasible(snap, gamma)) continue;
        const auto xi = geepc::default_opportunism(snap, c.opportunism_scale);
        const double t_max = geepc::compute_t_max(snap, gamma, xi, c.iteration);
        const auto sol = geepc::dinkelbach_solve(snap, gamma, t_max, c.solver);
        std::optional<geepc::GridErrorEstimate> estimate;
        try {
          estimate = geepc::estimate_grid_error(snap, gamma, oracle_grid);
        } catch (const geepc::Infeasible&) {
          if (!oracle_opts.quiet) {
            fmt::print("snapshot {:>4}: no grid point meets the targets, skipped\n", i);
          }
          continue;
        }
        const auto& grid = *estimate;
        const bool ok = std::abs(sol.q_star - grid.fine.best_gee) <= grid.bound &&
                        sol.q_star >= grid.fine.best_gee - 1e-12;
        ++checked;
        agree += ok ? 1 : 0;
        if (!oracle_opts.quiet) {
          fmt::print("snapshot {:>4}: q* {:.10g}  grid {:.10g}  bound {:.3g}  {}\n", i, sol.q_star,
                     grid.fine.best_gee, grid.bound, ok ? "agree" : "MISMATCH");
        }
      }
      if (!oracle_opts.quiet) fmt::print("{}/{} snapshots agree\n", agree, checked);
      if (checked == 0) return kInfeasible;
      return agree == checked ? kOk : kSolverFailure;
    }
  } catch (const geepc::ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const geepc::SolverFailure& e) {
    fmt::print(std::cerr, "solver failure: {}\n", e.what());
    return kSolverFailure;
  } catch (const geepc::Error& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  return kOk;
}
