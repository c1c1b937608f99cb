#include "geepc/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "geepc/errors.hpp"

namespace geepc {

double load_denominator(std::span<const double> targets) {
  double load = 0.0;
  for (double g : targets) load += g / (g + 1.0);
  return 1.0 - load;
}

PowerVector power_for_targets(const NetworkSnapshot& snapshot, std::span<const double> targets) {
  if (targets.size() != snapshot.k) {
    throw InvalidParameter(
        fmt::format("{} targets for a snapshot with {} UEs", targets.size(), snapshot.k));
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!(targets[i] >= 0.0) || std::isinf(targets[i]))
      throw InvalidParameter(fmt::format("target SINR {} of UE {} is not finite and >= 0", targets[i], i));
  }
  const double denominator = load_denominator(targets);
  if (!(denominator > 0.0)) {
    throw StructurallyInfeasible(
        fmt::format("targets load the cell to {} >= 1", 1.0 - denominator), denominator);
  }
  const double scale = snapshot.noise_power / denominator;
  PowerVector p(snapshot.k);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    p[i] = targets[i] / (snapshot.gains[i] * (targets[i] + 1.0)) * scale;
  }
  return p;
}

bool is_feasible(const NetworkSnapshot& snapshot, std::span<const double> targets) {
  return diagnose(snapshot, targets).feasible;
}

PowerVector feasible_power_for_targets(const NetworkSnapshot& snapshot,
                                       std::span<const double> targets) {
  PowerVector p = power_for_targets(snapshot, targets);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    if (p[i] > snapshot.max_power[i]) {
      throw Infeasible(fmt::format("UE {} needs {} W for its target, cap is {} W", i, p[i],
                                   snapshot.max_power[i]),
                       i, p[i], snapshot.max_power[i]);
    }
  }
  return p;
}

FeasibilityDiagnostics diagnose(const NetworkSnapshot& snapshot, std::span<const double> targets) {
  FeasibilityDiagnostics d;
  if (targets.size() != snapshot.k) {
    throw InvalidParameter(
        fmt::format("{} targets for a snapshot with {} UEs", targets.size(), snapshot.k));
  }
  if (std::any_of(targets.begin(), targets.end(),
                  [](double g) { return !(g >= 0.0) || std::isinf(g); })) {
    d.denominator = -std::numeric_limits<double>::infinity();
    return d;
  }
  d.denominator = load_denominator(targets);
  d.structurally_feasible = d.denominator > 0.0;
  if (!d.structurally_feasible) return d;

  d.required_power = power_for_targets(snapshot, targets);
  d.within_cap.resize(snapshot.k);
  d.feasible = true;
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    d.within_cap[i] = d.required_power[i] >= 0.0 && d.required_power[i] <= snapshot.max_power[i];
    d.feasible = d.feasible && d.within_cap[i];
  }
  return d;
}

double max_common_target(const NetworkSnapshot& snapshot) {
  const auto feasible_at = [&](double g) {
    return is_feasible(snapshot, std::vector<double>(snapshot.k, g));
  };

  double lo = 0.0;
  double hi = 0.0;
  if (snapshot.k == 1) {
    // No interference: the cap alone bounds the target. Grow a bracket.
    hi = 1.0;
    while (feasible_at(hi)) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    hi = 1.0 / static_cast<double>(snapshot.k - 1);
  }

  for (int step = 0; step < 200 && hi - lo > 1e-6 * hi; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double max_common_target_closed_form(const NetworkSnapshot& snapshot) {
  double worst = 0.0;
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    worst = std::max(worst, snapshot.noise_power / (snapshot.gains[i] * snapshot.max_power[i]));
  }
  return 1.0 / (static_cast<double>(snapshot.k) - 1.0 + worst);
}

}  // namespace geepc
