#include "geepc/power_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "geepc/errors.hpp"
#include "geepc/rng.hpp"

namespace geepc {

namespace {

void check_size(std::size_t got, std::size_t k, const char* what) {
  if (got != k) throw InvalidParameter(fmt::format("{} has {} entries, expected {}", what, got, k));
}

}  // namespace

TargetSpec make_targets(std::span<const double> min_sinr, std::span<const double> delta,
                        double t_max) {
  check_size(delta.size(), min_sinr.size(), "delta");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw InvalidParameter(fmt::format("T^max must be finite and >= 0, got {}", t_max));
  }
  double delta_sum = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (!(delta[i] >= 0.0 && delta[i] <= 1.0))
      throw InvalidParameter(fmt::format("delta[{}] = {} outside [0, 1]", i, delta[i]));
    if (!(min_sinr[i] >= 0.0))
      throw InvalidParameter(fmt::format("min_sinr[{}] = {} is negative", i, min_sinr[i]));
    delta_sum += delta[i];
  }
  if (delta_sum > 1.0 + 1e-9) {
    throw InvalidParameter(fmt::format("sum of delta is {} > 1", delta_sum));
  }

  TargetSpec t;
  t.min_sinr.assign(min_sinr.begin(), min_sinr.end());
  t.delta.assign(delta.begin(), delta.end());
  t.t_max = t_max;
  t.lambda.resize(min_sinr.size());
  for (std::size_t i = 0; i < min_sinr.size(); ++i) {
    t.lambda[i] = std::max(min_sinr[i], std::exp2(delta[i] * t_max) - 1.0);
  }
  return t;
}

TargetSpec min_sinr_targets(std::span<const double> min_sinr) {
  const std::vector<double> zero(min_sinr.size(), 0.0);
  return make_targets(min_sinr, zero, 0.0);
}

std::vector<double> observed_effective_interference(const NetworkSnapshot& snapshot,
                                                    std::span<const double> p) {
  auto phi = effective_interference(snapshot, p);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    if (p[i] > 0.0) {
      const double gamma = p[i] / phi[i];
      if (gamma > 0.0) phi[i] = local_effective_interference(p[i], gamma);
    }
  }
  return phi;
}

PowerVector proposed_update(const NetworkSnapshot& snapshot, const TargetSpec& targets,
                            std::span<const double> p) {
  check_size(targets.lambda.size(), snapshot.k, "lambda");
  const auto phi = observed_effective_interference(snapshot, p);
  PowerVector next(snapshot.k);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    next[i] = std::min(snapshot.max_power[i], targets.lambda[i] * phi[i]);
  }
  return next;
}

PowerVector tpc_update(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                       std::span<const double> p) {
  check_size(min_sinr.size(), snapshot.k, "min_sinr");
  const auto phi = observed_effective_interference(snapshot, p);
  PowerVector next(snapshot.k);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    next[i] = std::min(snapshot.max_power[i], min_sinr[i] * phi[i]);
  }
  return next;
}

PowerVector dtpc_update(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                        std::span<const double> opportunism, std::span<const double> p) {
  check_size(min_sinr.size(), snapshot.k, "min_sinr");
  check_size(opportunism.size(), snapshot.k, "opportunism");
  const auto phi = observed_effective_interference(snapshot, p);
  PowerVector next(snapshot.k);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    const double tracking = min_sinr[i] * phi[i];
    const double opportunistic = opportunism[i] / phi[i];
    next[i] = std::min(snapshot.max_power[i], std::max(tracking, opportunistic));
  }
  return next;
}

std::vector<double> default_opportunism(const NetworkSnapshot& snapshot, double scale) {
  if (!(scale > 0.0)) throw InvalidParameter("opportunism scale must be positive");
  std::vector<double> xi(snapshot.k);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    xi[i] = scale * snapshot.max_power[i] * snapshot.noise_power / snapshot.gains[i];
  }
  return xi;
}

UpdateFn proposed_rule(TargetSpec targets) {
  return [t = std::move(targets)](const NetworkSnapshot& s, std::span<const double> p) {
    return proposed_update(s, t, p);
  };
}

UpdateFn tpc_rule(SinrVector min_sinr) {
  return [g = std::move(min_sinr)](const NetworkSnapshot& s, std::span<const double> p) {
    return tpc_update(s, g, p);
  };
}

UpdateFn dtpc_rule(SinrVector min_sinr, std::vector<double> opportunism) {
  return [g = std::move(min_sinr), xi = std::move(opportunism)](const NetworkSnapshot& s,
                                                                std::span<const double> p) {
    return dtpc_update(s, g, xi, p);
  };
}

void IterationConfig::validate() const {
  if (!(tolerance > 0.0)) throw InvalidParameter("iteration tolerance must be positive");
  if (max_iterations < 1) throw InvalidParameter("max_iterations must be at least 1");
  if (!(change_floor_w > 0.0)) throw InvalidParameter("change floor must be positive");
  if (!initial_power && !(initial_fraction > 0.0 && initial_fraction <= 1.0)) {
    throw InvalidParameter("initial_fraction must lie in (0, 1]");
  }
}

PowerVector initial_power(const NetworkSnapshot& snapshot, const IterationConfig& config) {
  if (config.initial_power) {
    check_power_vector(snapshot, *config.initial_power);
    return *config.initial_power;
  }
  PowerVector p(snapshot.k);
  for (std::size_t i = 0; i < snapshot.k; ++i) p[i] = config.initial_fraction * snapshot.max_power[i];
  return p;
}

double relative_change(std::span<const double> prev, std::span<const double> next, double floor) {
  double worst = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    worst = std::max(worst, std::abs(next[i] - prev[i]) / std::max(prev[i], floor));
  }
  return worst;
}

IterationTrace iterate(const UpdateFn& update, const NetworkSnapshot& snapshot,
                       const IterationConfig& config) {
  config.validate();
  IterationTrace trace;
  PowerVector p = initial_power(snapshot, config);
  trace.steps.push_back({p, metrics(snapshot, p), 0.0});

  for (std::size_t t = 0; t < config.max_iterations; ++t) {
    PowerVector next = update(snapshot, p);
    check_size(next.size(), snapshot.k, "update output");
    const double change = relative_change(p, next, config.change_floor_w);
    p = std::move(next);
    trace.iterations_used = t + 1;
    trace.steps.push_back({p, metrics(snapshot, p), change});
    if (change < config.tolerance) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

ScalabilityReport check_two_sided_scalable(const UpdateFn& update, const NetworkSnapshot& snapshot,
                                           std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidParameter("need at least one trial");
  Rng rng(seed);
  ScalabilityReport report;
  constexpr double slack = 1e-12;  // round-off allowance, relative

  for (std::size_t trial = 0; trial < trials; ++trial) {
    report.trials = trial + 1;
    const double a = std::max(std::pow(10.0, rng.uniform()), 1.0 + 1e-9);

    PowerVector p(snapshot.k), q(snapshot.k);
    for (std::size_t i = 0; i < snapshot.k; ++i) {
      p[i] = snapshot.max_power[i] * std::pow(10.0, rng.uniform(-6.0, 0.0));
      const double lo = p[i] / a;
      const double hi = std::min(a * p[i], snapshot.max_power[i]);
      // Push a quarter of the draws onto each end of the interval, where
      // violations of the bound show up first.
      const double u = rng.uniform();
      if (u < 0.25) {
        q[i] = lo;
      } else if (u < 0.5) {
        q[i] = hi;
      } else {
        q[i] = lo * std::pow(hi / lo, rng.uniform());
      }
    }

    const PowerVector fp = update(snapshot, p);
    const PowerVector fq = update(snapshot, q);
    for (std::size_t i = 0; i < snapshot.k; ++i) {
      const bool below = fq[i] < fp[i] / a * (1.0 - slack);
      const bool above = fq[i] > fp[i] * a * (1.0 + slack);
      if (below || above) {
        report.counterexample = ScalabilityCounterexample{trial, i, a, p, q, fp[i], fq[i]};
        return report;
      }
    }
  }
  return report;
}

}  // namespace geepc
