#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "geepc/gee_solver.hpp"
#include "geepc/network_model.hpp"
#include "geepc/power_iteration.hpp"

namespace geepc {

enum class Algorithm { proposed, tpc, dtpc, centralized };

std::string_view to_string(Algorithm a);
/// Throws ConfigError for unknown names.
Algorithm parse_algorithm(std::string_view name);
/// Comma-separated list, e.g. "proposed,tpc". Duplicates are dropped.
std::vector<Algorithm> parse_algorithm_list(std::string_view list);

/// Radio constants as they appear in configuration files.
struct RadioConfig {
  double circuit_power_bs_dbm = 30.0;
  double circuit_power_ue_dbm = 20.0;
  double amp_inefficiency = 5.0;
  double max_power_dbm = 23.0;
  double noise_power_dbm = -113.0;

  RadioConstants linear() const;
};

enum class DeltaPolicy {
  per_snapshot,       ///< solve the delta problem on every snapshot
  per_configuration,  ///< solve once on a reference snapshot, reuse everywhere
};

struct ExperimentConfig {
  CellGeometry geometry;
  std::size_t ue_count = 5;
  RadioConfig radio;
  std::vector<double> target_sinr_db{-20.0, -16.0, -12.0, -8.0};
  std::size_t snapshots = 1000;
  std::uint64_t master_seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::proposed, Algorithm::tpc, Algorithm::dtpc};
  std::size_t workers = 0;  ///< 0 = one per hardware thread
  DeltaPolicy delta_policy = DeltaPolicy::per_snapshot;
  IterationConfig iteration;
  SolverOptions solver;
  double opportunism_scale = 1.0;

  /// Throws ConfigError.
  void validate() const;
  bool runs(Algorithm a) const;
};

/// INI-style text: [section] headers and `key = value` lines, '#' or ';'
/// comments. Unknown sections or keys are rejected. Missing keys keep
/// their defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Inverse of parse_config for every key it understands.
std::string format_config(const ExperimentConfig& config);

}  // namespace geepc
