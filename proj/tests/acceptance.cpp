// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "geepc/config.hpp"
#include "geepc/experiment.hpp"
#include "geepc/feasibility.hpp"
#include "geepc/gee_solver.hpp"
#include "geepc/power_iteration.hpp"
#include "geepc/report.hpp"
#include "geepc/units.hpp"
#include "support.hpp"

using namespace geepc;
using geepc::testing::rel_err;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const ReportRow& row(const ExperimentReport& r, std::string_view algorithm, double target) {
  for (const auto& x : r.rows) {
    if (x.algorithm == algorithm && x.target_sinr_db == target) return x;
  }
  throw std::runtime_error(fmt::format("no row for {} at {} dB", algorithm, target));
}

Outcome convergence_speed() {
  Outcome o{true, ""};
  for (double target : {-15.0, -10.0}) {
    ExperimentConfig c;
    c.snapshots = 200;
    c.iteration.tolerance = 1e-4;
    c.algorithms = {Algorithm::proposed};
    c.target_sinr_db = {target};
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = run_experiment(c);
    const double elapsed = seconds_since(t0);
    const auto& r = row(report, "proposed", target);
    const bool ok = r.mean_iterations >= 5.0 && r.mean_iterations <= 30.0 && elapsed < 10.0 &&
                    r.snapshots_used > 0;
    o.pass = o.pass && ok;
    o.detail += fmt::format("{} dB: mean iterations {:.2f} over {} snapshots in {:.2f} s; ", target,
                            r.mean_iterations, r.snapshots_used, elapsed);
  }
  return o;
}

Outcome uniqueness() {
  const double tol = IterationConfig{}.tolerance;
  const std::vector<double> targets{-20.0, -16.0, -12.0, -8.0};
  std::size_t failures = 0, snapshots = 0;
  double worst = 0.0;
  std::uint64_t cursor = 1000;
  for (int n = 0; n < 100; ++n) {
    const double target = targets[n % targets.size()];
    const auto s = testing::feasible_snapshot(cursor, 5, target);
    const auto gamma = uniform_targets(5, target);
    const auto spec = testing::proposed_targets(s, gamma);
    std::vector<IterationTrace> traces;
    for (double fraction : {1e-6, 0.5, 1.0}) {
      IterationConfig cfg;
      cfg.initial_fraction = fraction;
      traces.push_back(iterate(proposed_rule(spec), s, cfg));
    }
    ++snapshots;
    bool ok = std::all_of(traces.begin(), traces.end(), [](auto& t) { return t.converged; });
    for (std::size_t a = 1; a < traces.size(); ++a) {
      const double d = testing::max_rel_err(traces[0].final_power(), traces[a].final_power());
      worst = std::max(worst, d);
      ok = ok && d <= 10.0 * tol;
    }
    failures += ok ? 0 : 1;
  }
  return {failures == 0,
          fmt::format("{} snapshots x 3 starts, {} failures, worst component deviation {:.2e} "
                      "(limit {:.0e})",
                      snapshots, failures, worst, 10.0 * tol)};
}

Outcome scalability() {
  std::size_t violations = 0, trials = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = testing::default_snapshot(derive_seed(77, seed));
    const double target = -20.0 + 1.2 * static_cast<double>(seed);
    const auto gamma = uniform_targets(5, target);
    std::vector<double> delta(5);
    for (std::size_t i = 0; i < 5; ++i) delta[i] = 0.04 * static_cast<double>(i + seed % 3);
    const auto spec = make_targets(gamma, delta, 6.0);
    for (const auto& f : {proposed_rule(spec), tpc_rule(gamma), dtpc_rule(gamma, default_opportunism(s))}) {
      const auto r = check_two_sided_scalable(f, s, 1000, derive_seed(seed, trials));
      trials += r.trials;
      violations += r.holds() ? 0 : 1;
    }
  }
  const UpdateFn square = [](const NetworkSnapshot&, std::span<const double> x) {
    PowerVector out(x.begin(), x.end());
    for (auto& v : out) v *= v;
    return out;
  };
  const auto broken = check_two_sided_scalable(square, testing::default_snapshot(5), 1000, 9);
  return {violations == 0 && !broken.holds(),
          fmt::format("{} trials over proposed/tpc/dtpc on 10 snapshots, {} counterexamples; "
                      "squaring map counterexample {}",
                      trials, violations, broken.holds() ? "NOT found" : "found")};
}

Outcome tpc_closed_form() {
  double worst_fp = 0.0, worst_rt = 0.0;
  std::size_t fixed_points = 0, round_trips = 0;
  bool converged = true;
  std::uint64_t cursor = 3000;
  const std::vector<double> targets{-20.0, -16.0, -12.0, -8.0};
  for (int n = 0; n < 100; ++n) {
    const double target = targets[n % targets.size()];
    const auto s = testing::feasible_snapshot(cursor, 5, target);
    const auto gamma = uniform_targets(5, target);
    const auto closed = power_for_targets(s, gamma);
    bool capped = false;
    for (std::size_t i = 0; i < s.k; ++i) capped = capped || closed[i] >= s.max_power[i];
    if (capped) continue;
    IterationConfig cfg;
    cfg.tolerance = 1e-13;
    cfg.max_iterations = 20000;
    const auto trace = iterate(tpc_rule(gamma), s, cfg);
    converged = converged && trace.converged;
    worst_fp = std::max(worst_fp, testing::max_rel_err(trace.final_power(), closed));
    ++fixed_points;
  }
  Rng rng(41);
  for (int n = 0; n < 1000; ++n) {
    const std::size_t k = 1 + n % 10;
    const auto s = testing::default_snapshot(rng.next(), k);
    SinrVector g(k);
    const double load = rng.uniform(0.01, 0.99);
    for (auto& x : g) {
      const double u = load / static_cast<double>(k) * rng.uniform(0.2, 1.8);
      x = u / (1.0 - u);
    }
    if (load_denominator(g) <= 0.0) continue;
    worst_rt = std::max(worst_rt, testing::max_rel_err(sinr(s, power_for_targets(s, g)), g));
    ++round_trips;
  }
  return {converged && fixed_points > 0 && worst_fp <= 1e-8 && worst_rt < 1e-10,
          fmt::format("{} uncapped fixed points, worst deviation {:.2e} (limit 1e-8); "
                      "{} round trips, worst {:.2e} (limit 1e-10)",
                      fixed_points, worst_fp, round_trips, worst_rt)};
}

std::vector<Outcome> sweep_claims(const ExperimentReport& report, const ExperimentConfig& c) {
  Outcome order{true, ""}, central{true, ""};
  double prev = std::numeric_limits<double>::infinity();
  for (double t : c.target_sinr_db) {
    const auto& p = row(report, "proposed", t);
    const auto& tpc = row(report, "tpc", t);
    const auto& dtpc = row(report, "dtpc", t);
    const auto& q = row(report, "centralized", t);
    const bool ok = p.snapshots_used > 0 && p.mean_gee >= tpc.mean_gee && p.mean_gee >= dtpc.mean_gee &&
                    p.mean_gee <= prev;
    order.pass = order.pass && ok;
    order.detail += fmt::format("{} dB: {:.5g} vs tpc {:.5g}, dtpc {:.5g}; ", t, p.mean_gee,
                                tpc.mean_gee, dtpc.mean_gee);
    prev = p.mean_gee;
    const double gap = std::abs(p.mean_gee - q.mean_gee) / q.mean_gee;
    central.pass = central.pass && p.snapshots_used > 0 && gap <= 0.02;
    central.detail += fmt::format("{} dB: gap {:.2e}; ", t, gap);
  }
  order.detail += fmt::format("{} snapshots used of {}", report.rows.front().snapshots_used, c.snapshots);
  return {order, central};
}

Outcome oracle_equivalence() {
  std::size_t agree = 0, total = 0, monotone = 0;
  double worst_ratio = 0.0;
  Rng rng(2718);
  for (std::size_t k : {1u, 2u, 3u}) {
    const std::size_t grid = k == 1 ? 2048 : (k == 2 ? 256 : 48);
    for (int n = 0; n < 20;) {
      const auto s = testing::default_snapshot(rng.next(), k);
      const double target = rng.uniform(-20.0, -5.0);
      const auto gamma = uniform_targets(k, target);
      if (!is_feasible(s, gamma)) continue;
      ++n;
      ++total;
      const auto sol = dinkelbach_solve(s, gamma, compute_t_max(s, gamma, default_opportunism(s)));
      const auto est = estimate_grid_error(s, gamma, grid);
      const double diff = std::abs(sol.q_star - est.fine.best_gee);
      worst_ratio = std::max(worst_ratio, diff / est.bound);
      if (diff <= est.bound && sol.q_star >= est.fine.best_gee - 1e-12) ++agree;
      if (std::is_sorted(sol.q_history.begin(), sol.q_history.end())) ++monotone;
    }
  }
  return {agree == total && monotone == total,
          fmt::format("{}/{} instances within the grid bound (worst |q*-grid|/bound {:.3f}), "
                      "{}/{} non-decreasing q sequences",
                      agree, total, worst_ratio, monotone, total)};
}

Outcome feasibility_bound() {
  std::size_t below = 0, in_range = 0;
  double lo = 1e300, hi = -1e300;
  const std::size_t n = 200;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = testing::default_snapshot(derive_seed(1, i));
    const double db = linear_to_db(max_common_target(s));
    below += db < linear_to_db(0.25) ? 1 : 0;
    in_range += (db >= -9.0 && db <= -6.02) ? 1 : 0;
    lo = std::min(lo, db);
    hi = std::max(hi, db);
  }
  return {below == n && in_range == n,
          fmt::format("{} snapshots: {} below -6.02 dB, {} in [-9, -6.02] dB, range [{:.3f}, {:.3f}] dB",
                      n, below, in_range, lo, hi)};
}

Outcome gradient() {
  Rng rng(314);
  double worst = 0.0, worst_plain = 0.0;
  std::size_t components = 0;
  for (int n = 0; n < 100; ++n) {
    const auto s = testing::default_snapshot(rng.next(), 1 + n % 8);
    PowerVector p(s.k);
    for (std::size_t i = 0; i < s.k; ++i) p[i] = s.max_power[i] * rng.uniform(0.01, 0.99);
    const double q = rng.uniform(0.0, 3.0);
    const auto g = subtractive_gradient(s, p, q);
    const auto gt = subtractive_gradient(s, p, 0.0);
    for (std::size_t j = 0; j < s.k; ++j) {
      const double h = 1e-6 * p[j];
      auto up = p, down = p;
      up[j] += h;
      down[j] -= h;
      const double fd = (subtractive_objective(s, up, q) - subtractive_objective(s, down, q)) / (2 * h);
      // Relative to the magnitude of the two terms, which cancel near stationarity.
      const double scale = std::abs(gt[j]) + q * s.amp_inefficiency[j];
      worst = std::max(worst, std::abs(fd - g[j]) / scale);
      worst_plain = std::max(worst_plain, rel_err(fd, g[j]));
      ++components;
    }
  }
  return {worst <= 1e-5 && worst_plain <= 1e-5,
          fmt::format("100 points, {} components, worst error {:.2e} relative to the term size, "
                      "{:.2e} relative to the gradient itself (limit 1e-5)",
                      components, worst, worst_plain)};
}

Outcome determinism(const ExperimentReport& first, ExperimentConfig c) {
  c.workers = 3;
  const auto second = run_experiment(c);
  std::ostringstream a, b, sa, sb;
  write_experiment_csv(a, first.rows);
  write_experiment_csv(b, second.rows);
  write_snapshot_csv(sa, first.snapshot_rows);
  write_snapshot_csv(sb, second.snapshot_rows);
  const bool same = a.str() == b.str() && sa.str() == sb.str();
  return {same, fmt::format("experiment csv {} bytes, snapshot csv {} bytes, {}", a.str().size(),
                            sa.str().size(), same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> checks;
  ExperimentConfig sweep;
  sweep.snapshots = 200;
  ExperimentReport sweep_report;
  std::vector<Outcome> sweep_outcomes;
  auto sweep_once = [&]() -> const std::vector<Outcome>& {
    if (sweep_outcomes.empty()) {
      sweep_report = run_experiment(sweep);
      sweep_outcomes = sweep_claims(sweep_report, sweep);
    }
    return sweep_outcomes;
  };

  checks.emplace_back("convergence speed", convergence_speed);
  checks.emplace_back("fixed-point uniqueness", uniqueness);
  checks.emplace_back("two-sided scalability", scalability);
  checks.emplace_back("fixed-target closed form", tpc_closed_form);
  checks.emplace_back("ordering over the sweep", [&] { return sweep_once()[0]; });
  checks.emplace_back("centralized match", [&] { return sweep_once()[1]; });
  checks.emplace_back("oracle equivalence", oracle_equivalence);
  checks.emplace_back("structural feasibility bound", feasibility_bound);
  checks.emplace_back("gradient correctness", gradient);
  checks.emplace_back("determinism", [&] {
    sweep_once();
    return determinism(sweep_report, sweep);
  });

  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += o.pass ? 0 : 1;
    fmt::print("criterion {:>2} {:<30} {}  ({:.1f} s) {}\n", i + 1, checks[i].first,
               o.pass ? "PASS" : "FAIL", seconds_since(t0), o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", checks.size() - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
