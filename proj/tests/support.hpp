#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <span>
#include <vector>

#include "geepc/experiment.hpp"
#include "geepc/feasibility.hpp"
#include "geepc/gee_solver.hpp"
#include "geepc/network_model.hpp"
#include "geepc/power_iteration.hpp"
#include "geepc/rng.hpp"

namespace geepc::testing {

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double max_rel_err(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_err(a[i], b[i]));
  return worst;
}

inline NetworkSnapshot default_snapshot(std::uint64_t seed, std::size_t k = 5) {
  return generate_snapshot(CellGeometry{}, k, RadioConstants{}, seed);
}

// First snapshot at or after `seed` on which the uniform target is feasible.
inline NetworkSnapshot feasible_snapshot(std::uint64_t& seed, std::size_t k, double target_db) {
  for (const std::uint64_t stop = seed + 10000; seed < stop; ++seed) {
    auto s = default_snapshot(derive_seed(0x5eed, seed), k);
    if (is_feasible(s, uniform_targets(k, target_db))) {
      ++seed;
      return s;
    }
  }
  throw std::runtime_error("no feasible snapshot for the requested target");
}

// Energy-efficient targets as the harness builds them.
inline TargetSpec proposed_targets(const NetworkSnapshot& s, std::span<const double> gamma,
                                   const SolverOptions& options = {}) {
  const auto xi = default_opportunism(s);
  const double t_max = compute_t_max(s, gamma, xi);
  const auto sol = dinkelbach_solve(s, gamma, t_max, options);
  return make_targets(gamma, sol.delta, sol.t_max);
}

}  // namespace geepc::testing
