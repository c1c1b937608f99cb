#pragma once

// Closed-form feasibility of target-SINR vectors in the single-cell uplink.
// With load share u_k = gamma_k / (gamma_k + 1), the unique power vector
// achieving gamma exactly is
//   p_i = gamma_i / (h_i (gamma_i + 1)) * sigma^2 / (1 - sum_k u_k),
// which exists iff the load stays below one.

#include <span>
#include <vector>

#include "geepc/network_model.hpp"

namespace geepc {

/// 1 - sum_k gamma_k / (gamma_k + 1).
double load_denominator(std::span<const double> targets);

/// Throws StructurallyInfeasible when the denominator is <= 0 and
/// InvalidParameter for negative targets.
PowerVector power_for_targets(const NetworkSnapshot& snapshot, std::span<const double> targets);

/// Denominator positive and 0 <= p_i <= p_max_i for the closed-form vector.
bool is_feasible(const NetworkSnapshot& snapshot, std::span<const double> targets);

/// Same as power_for_targets but also enforces the caps; the Infeasible
/// error names the first UE over its cap.
PowerVector feasible_power_for_targets(const NetworkSnapshot& snapshot,
                                       std::span<const double> targets);

/// Largest uniform target (linear) that is feasible, by bisection on
/// (0, 1/(K-1)) to 1e-6 relative. Always strictly below 1/(K-1).
double max_common_target(const NetworkSnapshot& snapshot);

/// Uniform-target threshold from the cap inequality solved directly:
/// 1 / (K - 1 + max_i sigma^2 / (h_i p_max_i)).
double max_common_target_closed_form(const NetworkSnapshot& snapshot);

struct FeasibilityDiagnostics {
  double denominator = 0.0;
  bool structurally_feasible = false;
  PowerVector required_power;  ///< empty when structurally infeasible
  std::vector<bool> within_cap;
  bool feasible = false;
};

FeasibilityDiagnostics diagnose(const NetworkSnapshot& snapshot, std::span<const double> targets);

}  // namespace geepc
