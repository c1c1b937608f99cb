#pragma once

// Distributed power-update maps and the synchronous fixed-point engine that
// drives them. Each map is a pure function of (snapshot, p); a UE only needs
// its own power, its SINR and its per-UE constants.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "geepc/network_model.hpp"

namespace geepc {

/// Per-UE SINR requirements of the energy-efficient scheme. `lambda` is the
/// combined target max{min_sinr_i, 2^(delta_i * t_max) - 1}.
struct TargetSpec {
  SinrVector min_sinr;
  std::vector<double> delta;
  double t_max = 0.0;
  SinrVector lambda;
};

/// Validates delta (each in [0,1], sum <= 1 up to 1e-9) and builds lambda.
TargetSpec make_targets(std::span<const double> min_sinr, std::span<const double> delta,
                        double t_max);

/// delta = 0: lambda collapses to min_sinr.
TargetSpec min_sinr_targets(std::span<const double> min_sinr);

/// Effective interference as seen by each UE: p_i / gamma_i where the SINR is
/// positive, the direct I_i / h_i otherwise (a UE that is silent has no
/// SINR feedback).
std::vector<double> observed_effective_interference(const NetworkSnapshot& snapshot,
                                                    std::span<const double> p);

/// p_i' = min{p_max_i, lambda_i * phi_i(p)}.
PowerVector proposed_update(const NetworkSnapshot& snapshot, const TargetSpec& targets,
                            std::span<const double> p);

/// Fixed-target tracking: p_i' = min{p_max_i, min_sinr_i * phi_i(p)}.
PowerVector tpc_update(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                       std::span<const double> p);

/// Dynamic-target tracking:
///   p_i' = min{p_max_i, max{min_sinr_i * phi_i, xi_i / phi_i}}.
/// Poor channels (large phi) track the minimum target, good channels
/// transmit opportunistically. xi_i has units of W^2.
PowerVector dtpc_update(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                        std::span<const double> opportunism, std::span<const double> p);

/// xi_i = scale * p_max_i * sigma^2 / h_i: the value at which the
/// opportunistic power equals the cap in the absence of interference.
std::vector<double> default_opportunism(const NetworkSnapshot& snapshot, double scale = 1.0);

using UpdateFn = std::function<PowerVector(const NetworkSnapshot&, std::span<const double>)>;

UpdateFn proposed_rule(TargetSpec targets);
UpdateFn tpc_rule(SinrVector min_sinr);
UpdateFn dtpc_rule(SinrVector min_sinr, std::vector<double> opportunism);

struct IterationConfig {
  double tolerance = 1e-6;          ///< on the relative max-norm power change
  std::size_t max_iterations = 500;
  double initial_fraction = 0.01;   ///< p_i(0) = fraction * p_max_i unless initial_power is set
  std::optional<PowerVector> initial_power;
  double change_floor_w = 1e-15;    ///< denominator floor of the relative change

  void validate() const;
};

struct IterationStep {
  PowerVector power;
  LinkMetrics metrics;
  double change = 0.0;  ///< relative change that produced this step (0 for the initial state)
};

struct IterationTrace {
  std::vector<IterationStep> steps;  ///< steps[0] is the initial state
  bool converged = false;
  std::size_t iterations_used = 0;

  const IterationStep& final_step() const { return steps.back(); }
  const PowerVector& final_power() const { return steps.back().power; }
};

PowerVector initial_power(const NetworkSnapshot& snapshot, const IterationConfig& config);

/// max_i |next_i - prev_i| / max(prev_i, floor).
double relative_change(std::span<const double> prev, std::span<const double> next, double floor);

/// Synchronous iteration p(t+1) = f(p(t)). Stops once the relative change
/// drops below the tolerance or after max_iterations updates; running out
/// of iterations is reported through `converged`, not thrown.
IterationTrace iterate(const UpdateFn& update, const NetworkSnapshot& snapshot,
                       const IterationConfig& config);

struct ScalabilityCounterexample {
  std::size_t trial = 0;
  std::size_t ue = 0;
  double scale = 1.0;  ///< the `a > 1` of the trial
  PowerVector p;
  PowerVector p_prime;
  double f_p = 0.0;        ///< f_ue(p)
  double f_p_prime = 0.0;  ///< f_ue(p')
};

struct ScalabilityReport {
  std::size_t trials = 0;
  std::optional<ScalabilityCounterexample> counterexample;

  bool holds() const { return !counterexample.has_value(); }
};

/// Randomized check of two-sided scalability: for p > 0, a > 1 and
/// p/a <= p' <= a p, require f(p)/a <= f(p') <= a f(p). Stops at the first
/// violation. Samples stay inside [0, p_max].
ScalabilityReport check_two_sided_scalable(const UpdateFn& update, const NetworkSnapshot& snapshot,
                                           std::size_t trials, std::uint64_t seed);

}  // namespace geepc
