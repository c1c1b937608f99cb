#pragma once

// Centralized reference for the energy-efficiency problem
//
//   maximize  T(p) / P^T(p)   s.t.  gamma_i(p) >= min_sinr_i,  0 <= p_i <= p_max_i
//
// solved with Dinkelbach's subtractive form max T(p) - q P^T(p), plus a
// brute-force grid oracle for k <= 3.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "geepc/network_model.hpp"
#include "geepc/power_iteration.hpp"

namespace geepc {

struct SolverOptions {
  std::size_t random_starts = 5;
  std::size_t max_inner_iterations = 2000;
  double dinkelbach_tolerance = 1e-8;
  std::size_t max_outer_iterations = 50;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;

  void validate() const;
};

/// T(p) - q P^T(p).
double subtractive_objective(const NetworkSnapshot& snapshot, std::span<const double> p, double q);

/// Analytic gradient of T(p) - q P^T(p) with respect to p:
///   dT/dp_j = h_j (1 - sum_{i != j} gamma_i) / ((sum_i p_i h_i + sigma^2) ln 2),
///   dP^T/dp_j = mu_j.
std::vector<double> subtractive_gradient(const NetworkSnapshot& snapshot,
                                         std::span<const double> p, double q);

struct InnerResult {
  PowerVector power;
  double objective = 0.0;
  std::size_t winning_start = 0;  ///< index into the start list, extra starts last
  std::size_t iterations = 0;     ///< ascent iterations of the winning start
};

/// Approximately maximizes T(p) - q P^T(p) over the feasible set by projected
/// gradient ascent from several starts: the minimum-power point, p_max, their
/// midpoint, `random_starts` random points and any `extra_starts`. The result
/// satisfies both constraints and is no worse than any (projected) start.
/// Throws Infeasible if min_sinr cannot be met.
InnerResult inner_maximize(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                           double q, const SolverOptions& options = {},
                           std::span<const PowerVector> extra_starts = {});

/// Total throughput at the dynamic-target (DTPC) fixed point.
double compute_t_max(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                     std::span<const double> opportunism, const IterationConfig& config = {});

struct DeltaSolution {
  std::vector<double> delta;     ///< per-UE throughput shares, sum <= 1
  double q_star = 0.0;           ///< GEE at `power`
  PowerVector power;
  std::size_t iterations = 0;    ///< Dinkelbach outer iterations
  std::vector<double> q_history; ///< q_0 (minimum-power point) then one entry per iteration
  std::vector<std::size_t> winning_starts;
  double t_max = 0.0;            ///< normalizer actually used for delta
};

/// Dinkelbach outer loop. delta_i = T_i(p*) / t_max; when the optimum carries
/// more throughput than the supplied t_max, the optimum's throughput is used
/// as the normalizer instead so that sum delta <= 1 still holds.
/// Throws SolverFailure if the loop does not settle within the budget.
DeltaSolution dinkelbach_solve(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                               double t_max, const SolverOptions& options = {});

struct OracleResult {
  PowerVector best_power;
  double best_gee = 0.0;
  std::size_t grid_resolution = 0;
  std::size_t feasible_points = 0;
};

/// Exhaustive search over the grid {j p_max_i / (n-1)}^k, keeping only
/// points that meet min_sinr. k <= 3 and n >= 16.
OracleResult brute_force_gee(const NetworkSnapshot& snapshot, std::span<const double> min_sinr,
                             std::size_t grid_resolution);

struct GridErrorEstimate {
  OracleResult coarse;  ///< n points per dimension
  OracleResult fine;    ///< 2n - 1 points, a superset of the coarse grid
  double bound = 0.0;
};

/// Error bound of the refined oracle: the larger of twice the gain from one
/// refinement step and the first-order change of GEE across one fine cell
/// at the refined optimum.
GridErrorEstimate estimate_grid_error(const NetworkSnapshot& snapshot,
                                      std::span<const double> min_sinr,
                                      std::size_t grid_resolution);

}  // namespace geepc
