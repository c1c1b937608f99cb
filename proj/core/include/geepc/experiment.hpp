#pragma once

// Seeded Monte Carlo harness. Snapshot i of a run with master seed s is
// generated from derive_seed(s, i), so the same snapshots are reused at
// every target SINR and for every worker count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geepc/config.hpp"
#include "geepc/gee_solver.hpp"
#include "geepc/network_model.hpp"
#include "geepc/power_iteration.hpp"

namespace geepc {

enum class SnapshotStatus { ok, infeasible, solver_failure };

struct AlgorithmRun {
  Algorithm algorithm;
  IterationTrace trace;
};

struct SnapshotRun {
  NetworkSnapshot snapshot;
  double target_sinr_db = 0.0;
  SnapshotStatus status = SnapshotStatus::ok;
  std::string message;                       ///< reason when status != ok
  std::vector<AlgorithmRun> runs;            ///< in config order
  std::optional<double> t_max;               ///< set when the delta problem was solved
  std::optional<DeltaSolution> centralized;  ///< idem
};

/// Uniform linear target vector for `target_db`.
SinrVector uniform_targets(std::size_t k, double target_db);

NetworkSnapshot snapshot_for(const ExperimentConfig& config, std::uint64_t seed);

/// Runs every configured algorithm on the snapshot generated from `seed`.
/// The delta problem is solved only when `proposed` is requested. An
/// infeasible target or a solver failure is reported through `status`.
SnapshotRun run_snapshot(const ExperimentConfig& config, double target_db, std::uint64_t seed);

/// Same on a given snapshot. `fixed_delta` bypasses the per-snapshot solve.
SnapshotRun run_on_snapshot(const ExperimentConfig& config, const NetworkSnapshot& snapshot,
                            double target_db,
                            const std::optional<std::vector<double>>& fixed_delta = std::nullopt);

/// One line of the aggregate table.
struct ReportRow {
  std::string algorithm;
  double target_sinr_db = 0.0;
  double mean_gee = 0.0;
  double mean_throughput = 0.0;
  double mean_total_power_w = 0.0;
  double mean_iterations = 0.0;
  std::size_t snapshots_used = 0;
  std::size_t snapshots_skipped = 0;

  bool operator==(const ReportRow&) const = default;
};

/// Per-snapshot outcome backing the aggregates.
struct SnapshotRow {
  double target_sinr_db = 0.0;
  std::size_t snapshot = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
  double gee = 0.0;
  double total_throughput = 0.0;
  double total_power_w = 0.0;
  std::size_t iterations = 0;
  bool converged = false;

  bool operator==(const SnapshotRow&) const = default;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<SnapshotRow> snapshot_rows;  ///< only snapshots that were used
  std::size_t snapshots = 0;
  std::size_t infeasible = 0;       ///< snapshots skipped for infeasibility (per sweep point, summed)
  std::size_t solver_failures = 0;  ///< idem for solver failures
  std::vector<std::string> diagnostics;

  /// True when no sweep point kept a single snapshot.
  bool all_empty() const;
};

/// Aggregates over snapshots where every algorithm ran. Rows are ordered by
/// target, then algorithm (config order, `centralized` last when present).
/// A snapshot infeasible at the largest target is skipped at every target.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct ConvergencePoint {
  std::string algorithm;
  std::size_t iteration = 0;
  double gee = 0.0;
  double total_throughput = 0.0;
  double total_power_w = 0.0;

  bool operator==(const ConvergencePoint&) const = default;
};

struct ConvergenceReport {
  double target_sinr_db = 0.0;
  std::size_t snapshots_used = 0;
  std::vector<ConvergencePoint> points;  ///< per algorithm, iteration 0..max
  std::vector<double> mean_iterations;   ///< per algorithm, config order
};

/// Per-iteration means over snapshots (traces that stopped early hold
/// their final value), for one target.
ConvergenceReport run_convergence(const ExperimentConfig& config, double target_db);

}  // namespace geepc
