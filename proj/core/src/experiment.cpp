#include "geepc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "geepc/errors.hpp"
#include "geepc/feasibility.hpp"
#include "geepc/rng.hpp"
#include "geepc/units.hpp"

namespace geepc {

namespace {

// Runs fn(i) for i in [0, n) on a small pool. Results must be written to
// per-index slots by fn; ordering of execution is unspecified.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

struct Outcome {
  Algorithm algorithm;
  double gee = 0.0;
  double throughput = 0.0;
  double power = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct Summary {
  SnapshotStatus status = SnapshotStatus::infeasible;
  std::string message;
  std::vector<Outcome> outcomes;
};

Summary summarize(const SnapshotRun& run) {
  Summary s;
  s.status = run.status;
  s.message = run.message;
  if (run.status != SnapshotStatus::ok) return s;
  for (const auto& r : run.runs) {
    const auto& m = r.trace.final_step().metrics;
    s.outcomes.push_back({r.algorithm, m.gee, m.total_throughput, m.total_power,
                          r.trace.iterations_used, r.trace.converged});
  }
  if (run.centralized) {
    const auto& c = *run.centralized;
    const auto m = metrics(run.snapshot, c.power);
    s.outcomes.push_back({Algorithm::centralized, c.q_star, m.total_throughput, m.total_power,
                          c.iterations, true});
  }
  return s;
}

std::vector<Algorithm> reported_algorithms(const ExperimentConfig& config) {
  auto algos = config.algorithms;
  if (config.runs(Algorithm::proposed)) algos.push_back(Algorithm::centralized);
  return algos;
}

// Delta vectors solved once on the first snapshot that is feasible at the
// largest target, one per target.
std::vector<std::optional<std::vector<double>>> reference_deltas(const ExperimentConfig& config,
                                                                 double max_target_db) {
  std::vector<std::optional<std::vector<double>>> out(config.target_sinr_db.size());
  if (config.delta_policy != DeltaPolicy::per_configuration || !config.runs(Algorithm::proposed)) {
    return out;
  }
  for (std::size_t i = 0; i < config.snapshots; ++i) {
    const auto snapshot = snapshot_for(config, derive_seed(config.master_seed, i));
    if (!is_feasible(snapshot, uniform_targets(snapshot.k, max_target_db))) continue;
    try {
      const auto xi = default_opportunism(snapshot, config.opportunism_scale);
      std::vector<std::optional<std::vector<double>>> found(out.size());
      for (std::size_t t = 0; t < out.size(); ++t) {
        const auto gamma = uniform_targets(snapshot.k, config.target_sinr_db[t]);
        const double t_max = compute_t_max(snapshot, gamma, xi, config.iteration);
        found[t] = dinkelbach_solve(snapshot, gamma, t_max, config.solver).delta;
      }
      return found;
    } catch (const SolverFailure&) {
      continue;
    }
  }
  return out;
}

}  // namespace

SinrVector uniform_targets(std::size_t k, double target_db) {
  return SinrVector(k, db_to_linear(target_db));
}

NetworkSnapshot snapshot_for(const ExperimentConfig& config, std::uint64_t seed) {
  return generate_snapshot(config.geometry, config.ue_count, config.radio.linear(), seed);
}

SnapshotRun run_snapshot(const ExperimentConfig& config, double target_db, std::uint64_t seed) {
  return run_on_snapshot(config, snapshot_for(config, seed), target_db);
}

SnapshotRun run_on_snapshot(const ExperimentConfig& config, const NetworkSnapshot& snapshot,
                            double target_db,
                            const std::optional<std::vector<double>>& fixed_delta) {
  SnapshotRun run;
  run.snapshot = snapshot;
  run.target_sinr_db = target_db;

  const auto gamma = uniform_targets(snapshot.k, target_db);
  const auto diag = diagnose(snapshot, gamma);
  if (!diag.feasible) {
    run.status = SnapshotStatus::infeasible;
    run.message = diag.structurally_feasible
                      ? fmt::format("target {} dB exceeds a power cap", target_db)
                      : fmt::format("target {} dB overloads the cell", target_db);
    return run;
  }

  const auto xi = default_opportunism(snapshot, config.opportunism_scale);
  try {
    for (const auto algorithm : config.algorithms) {
      switch (algorithm) {
        case Algorithm::tpc:
          run.runs.push_back({algorithm, iterate(tpc_rule(gamma), snapshot, config.iteration)});
          break;
        case Algorithm::dtpc:
          run.runs.push_back({algorithm, iterate(dtpc_rule(gamma, xi), snapshot, config.iteration)});
          break;
        case Algorithm::proposed: {
          run.t_max = compute_t_max(snapshot, gamma, xi, config.iteration);
          std::vector<double> delta;
          double t_max = *run.t_max;
          if (fixed_delta) {
            delta = *fixed_delta;
          } else {
            run.centralized = dinkelbach_solve(snapshot, gamma, t_max, config.solver);
            delta = run.centralized->delta;
            t_max = run.centralized->t_max;
          }
          const auto targets = make_targets(gamma, delta, t_max);
          run.runs.push_back({algorithm, iterate(proposed_rule(targets), snapshot, config.iteration)});
          break;
        }
        case Algorithm::centralized:
          break;
      }
    }
  } catch (const Infeasible& e) {
    run.status = SnapshotStatus::infeasible;
    run.message = e.what();
    run.runs.clear();
  } catch (const SolverFailure& e) {
    run.status = SnapshotStatus::solver_failure;
    run.message = e.what();
    run.runs.clear();
  }
  return run;
}

bool ExperimentReport::all_empty() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const ReportRow& r) { return r.snapshots_used == 0; });
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n = config.snapshots;
  const std::size_t n_targets = config.target_sinr_db.size();
  const double max_target =
      *std::max_element(config.target_sinr_db.begin(), config.target_sinr_db.end());
  const auto fixed = reference_deltas(config, max_target);

  std::vector<std::vector<Summary>> results(n, std::vector<Summary>(n_targets));
  std::vector<std::uint64_t> seeds(n);
  parallel_for(n, config.workers, [&](std::size_t i) {
    seeds[i] = derive_seed(config.master_seed, i);
    const auto snapshot = snapshot_for(config, seeds[i]);
    if (!is_feasible(snapshot, uniform_targets(snapshot.k, max_target))) {
      for (auto& s : results[i]) {
        s.status = SnapshotStatus::infeasible;
        s.message = fmt::format("infeasible at the largest target {} dB", max_target);
      }
      return;
    }
    for (std::size_t t = 0; t < n_targets; ++t) {
      results[i][t] = summarize(run_on_snapshot(config, snapshot, config.target_sinr_db[t], fixed[t]));
    }
  });

  ExperimentReport report;
  report.snapshots = n;
  const auto algos = reported_algorithms(config);
  for (std::size_t t = 0; t < n_targets; ++t) {
    const double target = config.target_sinr_db[t];
    std::vector<ReportRow> rows(algos.size());
    for (std::size_t a = 0; a < algos.size(); ++a) {
      rows[a].algorithm = std::string(to_string(algos[a]));
      rows[a].target_sinr_db = target;
    }
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = results[i][t];
      if (s.status == SnapshotStatus::infeasible) {
        ++report.infeasible;
        continue;
      }
      if (s.status == SnapshotStatus::solver_failure) {
        ++report.solver_failures;
        report.diagnostics.push_back(
            fmt::format("target {} dB, snapshot {}: {}", target, i, s.message));
        continue;
      }
      ++used;
      for (std::size_t a = 0; a < algos.size(); ++a) {
        const auto& o = s.outcomes[a];
        rows[a].mean_gee += o.gee;
        rows[a].mean_throughput += o.throughput;
        rows[a].mean_total_power_w += o.power;
        rows[a].mean_iterations += static_cast<double>(o.iterations);
        report.snapshot_rows.push_back({target, i, seeds[i], rows[a].algorithm, o.gee, o.throughput,
                                        o.power, o.iterations, o.converged});
      }
    }
    for (auto& r : rows) {
      const double denom = static_cast<double>(used);
      r.mean_gee /= denom;
      r.mean_throughput /= denom;
      r.mean_total_power_w /= denom;
      r.mean_iterations /= denom;
      r.snapshots_used = used;
      r.snapshots_skipped = n - used;
      report.rows.push_back(r);
    }
    if (used == 0) {
      report.diagnostics.push_back(
          fmt::format("target {} dB: no usable snapshot out of {}", target, n));
    }
  }
  return report;
}

ConvergenceReport run_convergence(const ExperimentConfig& config, double target_db) {
  config.validate();
  const std::size_t n = config.snapshots;
  std::vector<Summary> status(n);
  std::vector<std::vector<std::vector<std::array<double, 3>>>> curves(n);

  parallel_for(n, config.workers, [&](std::size_t i) {
    const auto snapshot = snapshot_for(config, derive_seed(config.master_seed, i));
    const auto run = run_on_snapshot(config, snapshot, target_db);
    status[i].status = run.status;
    if (run.status != SnapshotStatus::ok) return;
    for (const auto& r : run.runs) {
      std::vector<std::array<double, 3>> curve;
      curve.reserve(r.trace.steps.size());
      for (const auto& step : r.trace.steps) {
        curve.push_back({step.metrics.gee, step.metrics.total_throughput, step.metrics.total_power});
      }
      curves[i].push_back(std::move(curve));
    }
  });

  ConvergenceReport report;
  report.target_sinr_db = target_db;
  const std::size_t n_algos = config.algorithms.size();
  std::vector<std::size_t> longest(n_algos, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (status[i].status != SnapshotStatus::ok) continue;
    ++report.snapshots_used;
    for (std::size_t a = 0; a < n_algos; ++a) longest[a] = std::max(longest[a], curves[i][a].size());
  }
  report.mean_iterations.assign(n_algos, 0.0);
  if (report.snapshots_used == 0) return report;

  const double used = static_cast<double>(report.snapshots_used);
  for (std::size_t a = 0; a < n_algos; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      if (status[i].status == SnapshotStatus::ok) {
        report.mean_iterations[a] += static_cast<double>(curves[i][a].size() - 1) / used;
      }
    }
    for (std::size_t it = 0; it < longest[a]; ++it) {
      ConvergencePoint pt;
      pt.algorithm = std::string(to_string(config.algorithms[a]));
      pt.iteration = it;
      for (std::size_t i = 0; i < n; ++i) {
        if (status[i].status != SnapshotStatus::ok) continue;
        const auto& curve = curves[i][a];
        const auto& v = curve[std::min(it, curve.size() - 1)];
        pt.gee += v[0];
        pt.total_throughput += v[1];
        pt.total_power_w += v[2];
      }
      pt.gee /= used;
      pt.total_throughput /= used;
      pt.total_power_w /= used;
      report.points.push_back(pt);
    }
  }
  return report;
}

}  // namespace geepc
