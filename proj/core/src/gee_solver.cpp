#include "geepc/gee_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "geepc/errors.hpp"
#include "geepc/feasibility.hpp"
#include "geepc/rng.hpp"

namespace geepc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// The ascent runs in load-share coordinates u_i = gamma_i / (1 + gamma_i).
// There the SINR floors are plain bounds u_i >= lower_i and each power cap
// is the half-space sum_j u_j + c_i u_i <= 1 with c_i = sigma^2 / (h_i p_max_i).
// Powers follow from p_i = u_i sigma^2 / (h_i (1 - sum_j u_j)).
class LoadShareSpace {
 public:
  LoadShareSpace(const NetworkSnapshot& snapshot, std::span<const double> min_sinr)
      : s_(snapshot), lower_(snapshot.k), cap_coeff_(snapshot.k) {
    for (std::size_t i = 0; i < s_.k; ++i) {
      lower_[i] = min_sinr[i] / (1.0 + min_sinr[i]);
      cap_coeff_[i] = s_.noise_power / (s_.gains[i] * s_.max_power[i]);
    }
  }

  std::size_t size() const { return s_.k; }

  PowerVector to_power(std::span<const double> u) const {
    const double denom = 1.0 - std::accumulate(u.begin(), u.end(), 0.0);
    PowerVector p(s_.k);
    for (std::size_t i = 0; i < s_.k; ++i) {
      const double raw = u[i] * s_.noise_power / (s_.gains[i] * denom);
      p[i] = std::clamp(raw, 0.0, s_.max_power[i]);
    }
    return p;
  }

  std::vector<double> from_power(std::span<const double> p) const {
    double total = s_.noise_power;
    for (std::size_t i = 0; i < s_.k; ++i) total += p[i] * s_.gains[i];
    std::vector<double> u(s_.k);
    for (std::size_t i = 0; i < s_.k; ++i) u[i] = p[i] * s_.gains[i] / total;
    return u;
  }

  std::vector<double> gradient(std::span<const double> u, std::span<const double> p,
                               double q) const {
    const auto gp = subtractive_gradient(s_, p, q);
    const double denom = 1.0 - std::accumulate(u.begin(), u.end(), 0.0);
    const double shared = dot(p, gp) / denom;
    std::vector<double> gu(s_.k);
    for (std::size_t j = 0; j < s_.k; ++j) {
      gu[j] = s_.noise_power / (s_.gains[j] * denom) * gp[j] + shared;
    }
    return gu;
  }

  // a_i^T u - 1 for cap i.
  double cap_slack(std::span<const double> u, std::size_t i) const {
    return std::accumulate(u.begin(), u.end(), 0.0) + cap_coeff_[i] * u[i] - 1.0;
  }

  bool caps_hold(std::span<const double> u) const {
    for (std::size_t i = 0; i < s_.k; ++i)
      if (cap_slack(u, i) > 0.0) return false;
    return true;
  }

  // Euclidean projection onto the feasible set. Clamping alone is exact when
  // the clamped point meets every cap; otherwise Dykstra's alternating
  // projections, followed by a shrink towards the lower corner that removes
  // any residual cap violation.
  std::vector<double> project(std::span<const double> y) const {
    const std::size_t k = s_.k;
    std::vector<double> x(y.begin(), y.end());
    clamp_lower(x);
    if (caps_hold(x)) return x;

    x.assign(y.begin(), y.end());
    std::vector<std::vector<double>> increments(k + 1, std::vector<double>(k, 0.0));
    std::vector<double> z(k), prev(k);
    for (int sweep = 0; sweep < 10000; ++sweep) {
      prev = x;
      for (std::size_t m = 0; m <= k; ++m) {
        for (std::size_t i = 0; i < k; ++i) z[i] = x[i] + increments[m][i];
        x = z;
        if (m == 0) {
          clamp_lower(x);
        } else {
          project_cap(x, m - 1);
        }
        for (std::size_t i = 0; i < k; ++i) increments[m][i] = z[i] - x[i];
      }
      double moved = 0.0;
      for (std::size_t i = 0; i < k; ++i) moved = std::max(moved, std::abs(x[i] - prev[i]));
      if (moved <= 1e-16) break;
    }

    clamp_lower(x);
    double shrink = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double excess = cap_slack(x, i);
      if (excess > 0.0) {
        const double room = -cap_slack(lower_, i);
        const double span = room + excess;
        shrink = std::min(shrink, span > 0.0 ? std::max(room, 0.0) / span : 0.0);
      }
    }
    if (shrink < 1.0) {
      for (std::size_t i = 0; i < k; ++i) x[i] = lower_[i] + shrink * (x[i] - lower_[i]);
    }
    return x;
  }

 private:
  void clamp_lower(std::vector<double>& x) const {
    for (std::size_t i = 0; i < s_.k; ++i) x[i] = std::max(x[i], lower_[i]);
  }

  void project_cap(std::vector<double>& x, std::size_t i) const {
    const double excess = cap_slack(x, i);
    if (excess <= 0.0) return;
    const double ci = cap_coeff_[i];
    const double norm2 = static_cast<double>(s_.k - 1) + (1.0 + ci) * (1.0 + ci);
    const double step = excess / norm2;
    for (std::size_t j = 0; j < s_.k; ++j) x[j] -= step;
    x[i] -= step * ci;
  }

  const NetworkSnapshot& s_;
  std::vector<double> lower_;
  std::vector<double> cap_coeff_;
};

struct AscentResult {
  std::vector<double> u;
  double objective = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
};

// Spectral projected gradient with Armijo backtracking; monotone in the
// objective, so the result is never worse than the projected start.
AscentResult ascend(const NetworkSnapshot& snapshot, const LoadShareSpace& space,
                    std::span<const double> start, double q, std::size_t max_iterations) {
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-20;
  constexpr double kMaxStep = 1e20;

  AscentResult r;
  r.u = space.project(start);
  PowerVector p = space.to_power(r.u);
  r.objective = subtractive_objective(snapshot, p, q);
  auto g = space.gradient(r.u, p, q);
  const double gnorm = max_abs(g);
  if (!(gnorm > 0.0) || !std::isfinite(gnorm)) return r;
  double alpha = 0.1 / gnorm;

  const std::size_t k = space.size();
  std::vector<double> trial(k), d(k), un(k), s(k), y(k);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    for (std::size_t i = 0; i < k; ++i) trial[i] = r.u[i] + alpha * g[i];
    trial = space.project(trial);
    for (std::size_t i = 0; i < k; ++i) d[i] = trial[i] - r.u[i];
    const double gd = dot(g, d);
    if (max_abs(d) <= 1e-15 || !(gd > 0.0)) break;

    double t = 1.0;
    bool accepted = false;
    double fn = r.objective;
    PowerVector pn;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < k; ++i) un[i] = r.u[i] + t * d[i];
      pn = space.to_power(un);
      fn = subtractive_objective(snapshot, pn, q);
      if (fn >= r.objective + kArmijo * t * gd) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const auto gn = space.gradient(un, pn, q);
    for (std::size_t i = 0; i < k; ++i) {
      s[i] = un[i] - r.u[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dot(s, y);
    alpha = sy < 0.0 ? std::clamp(dot(s, s) / -sy, kMinStep, kMaxStep) : kMaxStep;

    const double gain = fn - r.objective;
    r.u = un;
    r.objective = fn;
    g = gn;
    r.iterations = it + 1;
    if (gain <= 1e-15 * std::max(1.0, std::abs(fn)) && max_abs(s) <= 1e-13) break;
  }
  return r;
}

bool meets_targets(const NetworkSnapshot& snapshot, std::span<const double> p,
                   std::span<const double> min_sinr, double rel_tol) {
  const auto gamma = sinr(snapshot, p);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    if (gamma[i] < min_sinr[i] * (1.0 - rel_tol)) return false;
    if (p[i] < 0.0 || p[i] > snapshot.max_power[i]) return false;
  }
  return true;
}

void check_targets(const NetworkSnapshot& snapshot, std::span<const double> min_sinr) {
  if (min_sinr.size() != snapshot.k) {
    throw InvalidParameter(
        fmt::format("{} targets for a snapshot with {} UEs", min_sinr.size(), snapshot.k));
  }
}

}  // namespace

void SolverOptions::validate() const {
  if (max_inner_iterations < 1) throw InvalidParameter("max_inner_iterations must be >= 1");
  if (max_outer_iterations < 1) throw InvalidParameter("max_outer_iterations must be >= 1");
  if (!(dinkelbach_tolerance > 0.0)) throw InvalidParameter("dinkelbach_tolerance must be > 0");
}

double subtractive_objective(const NetworkSnapshot& snapshot, std::span<const double> p, double q) {
  const auto m = metrics(snapshot, p);
  return m.total_throughput - q * m.total_power;
}

std::vector<double> subtractive_gradient(const NetworkSnapshot& snapshot,
                                         std::span<const double> p, double q) {
  const auto gamma = sinr(snapshot, p);
  double received = snapshot.noise_power;
  for (std::size_t i = 0; i < snapshot.k; ++i) received += p[i] * snapshot.gains[i];
  const double gamma_sum = std::accumulate(gamma.begin(), gamma.end(), 0.0);

  std::vector<double> grad(snapshot.k);
  for (std::size_t j = 0; j < snapshot.k; ++j) {
    const double others = gamma_sum - gamma[j];
    grad[j] = snapshot.gains[j] * (1.0 - others) / (received * std::numbers::ln2) -
              q * snapshot.amp_inefficiency[j];
  }
  return grad;
}

InnerResult inner_maximize(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                           double q, const SolverOptions& options,
                           std::span<const PowerVector> extra_starts) {
  check_targets(snapshot, min_sinr);
  options.validate();
  if (!(q >= 0.0)) throw InvalidParameter(fmt::format("GEE weight q must be >= 0, got {}", q));

  const PowerVector p_min = feasible_power_for_targets(snapshot, min_sinr);
  const LoadShareSpace space(snapshot, min_sinr);

  std::vector<PowerVector> starts;
  starts.push_back(p_min);
  starts.push_back(snapshot.max_power);
  PowerVector mid(snapshot.k);
  for (std::size_t i = 0; i < snapshot.k; ++i) mid[i] = 0.5 * (p_min[i] + snapshot.max_power[i]);
  starts.push_back(mid);

  Rng rng(derive_seed(options.seed, snapshot.seed));
  for (std::size_t r = 0; r < options.random_starts; ++r) {
    PowerVector p(snapshot.k);
    for (std::size_t i = 0; i < snapshot.k; ++i) {
      const double lo = std::max(p_min[i], 1e-9 * snapshot.max_power[i]);
      p[i] = lo * std::pow(snapshot.max_power[i] / lo, rng.uniform());
    }
    starts.push_back(std::move(p));
  }
  for (const auto& extra : extra_starts) {
    check_power_vector(snapshot, extra);
    starts.push_back(extra);
  }

  InnerResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < starts.size(); ++idx) {
    const auto run = ascend(snapshot, space, space.from_power(starts[idx]), q,
                            options.max_inner_iterations);
    if (std::isfinite(run.objective) && run.objective > best.objective) {
      best.objective = run.objective;
      best.power = space.to_power(run.u);
      best.winning_start = idx;
      best.iterations = run.iterations;
    }
  }
  if (best.power.empty()) {
    throw SolverFailure(fmt::format("no start produced a finite objective (q = {})", q));
  }
  best.objective = subtractive_objective(snapshot, best.power, q);
  return best;
}

double compute_t_max(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                     std::span<const double> opportunism, const IterationConfig& config) {
  check_targets(snapshot, min_sinr);
  feasible_power_for_targets(snapshot, min_sinr);
  const auto trace = iterate(
      dtpc_rule(SinrVector(min_sinr.begin(), min_sinr.end()),
                std::vector<double>(opportunism.begin(), opportunism.end())),
      snapshot, config);
  return trace.final_step().metrics.total_throughput;
}

DeltaSolution dinkelbach_solve(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                               double t_max, const SolverOptions& options) {
  check_targets(snapshot, min_sinr);
  options.validate();
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw InvalidParameter(fmt::format("T^max must be positive and finite, got {}", t_max));
  }

  DeltaSolution sol;
  PowerVector current = feasible_power_for_targets(snapshot, min_sinr);
  double q = metrics(snapshot, current).gee;
  sol.q_history.push_back(q);

  bool settled = false;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < options.max_outer_iterations; ++n) {
    const std::array<PowerVector, 1> warm{current};
    auto inner = inner_maximize(snapshot, min_sinr, q, options, warm);
    residual = inner.objective;
    sol.winning_starts.push_back(inner.winning_start);
    sol.iterations = n + 1;

    const double q_next = metrics(snapshot, inner.power).gee;
    // The warm start keeps the residual >= 0 up to round-off, so q_next >= q;
    // keep the previous point if round-off says otherwise.
    if (q_next >= q) current = std::move(inner.power);
    sol.q_history.push_back(std::max(q_next, q));
    if (std::abs(residual) < options.dinkelbach_tolerance) {
      settled = true;
      break;
    }
    q = std::max(q_next, q);
  }
  if (!settled) {
    throw SolverFailure(fmt::format(
        "Dinkelbach did not settle in {} iterations: residual {}, q history [{}]",
        options.max_outer_iterations, residual, fmt::join(sol.q_history, ", ")));
  }
  if (!meets_targets(snapshot, current, min_sinr, 1e-9)) {
    throw SolverFailure("Dinkelbach optimum violates the SINR floors or the power caps");
  }

  const auto m = metrics(snapshot, current);
  sol.power = current;
  sol.q_star = m.gee;
  sol.t_max = std::max(t_max, m.total_throughput);
  sol.delta.resize(snapshot.k);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    sol.delta[i] = std::clamp(m.throughput[i] / sol.t_max, 0.0, 1.0);
  }
  return sol;
}

OracleResult brute_force_gee(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                             std::size_t grid_resolution) {
  check_targets(snapshot, min_sinr);
  const std::size_t k = snapshot.k;
  if (k > 3) throw InvalidParameter(fmt::format("grid oracle refuses k = {} > 3", k));
  if (grid_resolution < 16) throw InvalidParameter("grid resolution must be at least 16");

  OracleResult best;
  best.grid_resolution = grid_resolution;
  best.best_gee = -std::numeric_limits<double>::infinity();

  const double steps = static_cast<double>(grid_resolution - 1);
  std::array<std::size_t, 3> idx{};
  std::array<double, 3> p{}, rx{};
  const double static_power = snapshot.static_power();

  while (true) {
    double transmit = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      p[i] = snapshot.max_power[i] * static_cast<double>(idx[i]) / steps;
      rx[i] = p[i] * snapshot.gains[i];
      transmit += snapshot.amp_inefficiency[i] * p[i];
    }
    bool ok = true;
    double throughput = 0.0;
    for (std::size_t i = 0; i < k && ok; ++i) {
      double others = snapshot.noise_power;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) others += rx[j];
      const double gamma = rx[i] / others;
      ok = gamma >= min_sinr[i];
      throughput += std::log2(1.0 + gamma);
    }
    if (ok) {
      ++best.feasible_points;
      const double gee = throughput / (static_power + transmit);
      if (gee > best.best_gee) {
        best.best_gee = gee;
        best.best_power.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k));
      }
    }

    std::size_t d = 0;
    while (d < k && ++idx[d] == grid_resolution) idx[d++] = 0;
    if (d == k) break;
  }

  if (best.feasible_points == 0) {
    throw Infeasible(fmt::format("no grid point at resolution {} meets the SINR targets",
                                 grid_resolution),
                     Infeasible::npos, 0.0, 0.0);
  }
  return best;
}

GridErrorEstimate estimate_grid_error(const NetworkSnapshot& snapshot,
                                      std::span<const double> min_sinr,
                                      std::size_t grid_resolution) {
  GridErrorEstimate e;
  e.coarse = brute_force_gee(snapshot, min_sinr, grid_resolution);
  e.fine = brute_force_gee(snapshot, min_sinr, 2 * grid_resolution - 1);

  const auto& p = e.fine.best_power;
  const auto m = metrics(snapshot, p);
  const auto g = subtractive_gradient(snapshot, p, m.gee);
  double first_order = 0.0;
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    const double cell = snapshot.max_power[i] / static_cast<double>(2 * grid_resolution - 2);
    first_order += std::abs(g[i]) / m.total_power * cell;
  }
  e.bound = std::max(2.0 * (e.fine.best_gee - e.coarse.best_gee), first_order);
  return e;
}

}  // namespace geepc
