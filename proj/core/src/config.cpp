#include "geepc/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "geepc/errors.hpp"
#include "geepc/units.hpp"

namespace geepc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view raw) {
  const auto s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, raw));
  }
  return v;
}

template <typename Int>
Int to_integer(std::string_view key, std::string_view raw) {
  const auto s = trim(raw);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", key, raw));
  }
  return v;
}

std::vector<double> to_double_list(std::string_view key, std::string_view raw) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    const auto comma = raw.find(',', start);
    const auto item = trim(raw.substr(start, comma == std::string_view::npos ? raw.size() - start
                                                                              : comma - start));
    if (!item.empty()) out.push_back(to_double(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::proposed: return "proposed";
    case Algorithm::tpc: return "tpc";
    case Algorithm::dtpc: return "dtpc";
    case Algorithm::centralized: return "centralized";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  const auto n = trim(name);
  if (n == "proposed") return Algorithm::proposed;
  if (n == "tpc") return Algorithm::tpc;
  if (n == "dtpc") return Algorithm::dtpc;
  throw ConfigError(fmt::format("unknown algorithm '{}' (expected proposed, tpc or dtpc)", n));
}

std::vector<Algorithm> parse_algorithm_list(std::string_view list) {
  std::vector<Algorithm> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto item = trim(list.substr(
        start, comma == std::string_view::npos ? list.size() - start : comma - start));
    if (!item.empty()) {
      const auto a = parse_algorithm(item);
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("algorithm list is empty");
  return out;
}

RadioConstants RadioConfig::linear() const {
  RadioConstants r;
  r.circuit_power_bs_w = dbm_to_watts(circuit_power_bs_dbm);
  r.circuit_power_ue_w = dbm_to_watts(circuit_power_ue_dbm);
  r.amp_inefficiency = amp_inefficiency;
  r.max_power_w = dbm_to_watts(max_power_dbm);
  r.noise_power_w = dbm_to_watts(noise_power_dbm);
  return r;
}

void ExperimentConfig::validate() const {
  if (ue_count < 1) throw ConfigError("cell.ue_count must be >= 1");
  if (!(geometry.radius_m > 0.0)) throw ConfigError("cell.radius_m must be > 0");
  if (!(geometry.exponent > 0.0)) throw ConfigError("cell.pathloss_exponent must be > 0");
  if (!(geometry.min_distance_m > 0.0)) throw ConfigError("cell.min_distance_m must be > 0");
  if (!(radio.amp_inefficiency >= 1.0)) throw ConfigError("radio.amp_inefficiency must be >= 1");
  if (target_sinr_db.empty()) throw ConfigError("experiment.target_sinr_db is empty");
  if (snapshots < 1) throw ConfigError("experiment.snapshots must be >= 1");
  if (algorithms.empty()) throw ConfigError("experiment.algorithms is empty");
  if (!(opportunism_scale > 0.0)) throw ConfigError("dtpc.opportunism_scale must be > 0");
  try {
    iteration.validate();
    solver.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

bool ExperimentConfig::runs(Algorithm a) const {
  return std::find(algorithms.begin(), algorithms.end(), a) != algorithms.end();
}

ExperimentConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }

  ExperimentConfig c;
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw ConfigError(fmt::format("key '{}' must live inside a [section]", section));
    }
    for (const auto& [key, node] : entries) {
      const std::string name = section + "." + key;
      const std::string& v = node.data();
      if (name == "cell.radius_m") c.geometry.radius_m = to_double(name, v);
      else if (name == "cell.pl0_db") c.geometry.pl0_db = to_double(name, v);
      else if (name == "cell.pathloss_exponent") c.geometry.exponent = to_double(name, v);
      else if (name == "cell.min_distance_m") c.geometry.min_distance_m = to_double(name, v);
      else if (name == "cell.ue_count") c.ue_count = to_integer<std::size_t>(name, v);
      else if (name == "radio.circuit_power_bs_dbm") c.radio.circuit_power_bs_dbm = to_double(name, v);
      else if (name == "radio.circuit_power_ue_dbm") c.radio.circuit_power_ue_dbm = to_double(name, v);
      else if (name == "radio.amp_inefficiency") c.radio.amp_inefficiency = to_double(name, v);
      else if (name == "radio.max_power_dbm") c.radio.max_power_dbm = to_double(name, v);
      else if (name == "radio.noise_power_dbm") c.radio.noise_power_dbm = to_double(name, v);
      else if (name == "experiment.target_sinr_db") c.target_sinr_db = to_double_list(name, v);
      else if (name == "experiment.snapshots") c.snapshots = to_integer<std::size_t>(name, v);
      else if (name == "experiment.seed") c.master_seed = to_integer<std::uint64_t>(name, v);
      else if (name == "experiment.algorithms") c.algorithms = parse_algorithm_list(v);
      else if (name == "experiment.workers") c.workers = to_integer<std::size_t>(name, v);
      else if (name == "experiment.delta_policy") {
        const auto p = trim(v);
        if (p == "per_snapshot") c.delta_policy = DeltaPolicy::per_snapshot;
        else if (p == "per_configuration") c.delta_policy = DeltaPolicy::per_configuration;
        else throw ConfigError(fmt::format("{}: unknown policy '{}'", name, p));
      }
      else if (name == "iteration.tolerance") c.iteration.tolerance = to_double(name, v);
      else if (name == "iteration.max_iterations") c.iteration.max_iterations = to_integer<std::size_t>(name, v);
      else if (name == "iteration.initial_fraction") c.iteration.initial_fraction = to_double(name, v);
      else if (name == "solver.random_starts") c.solver.random_starts = to_integer<std::size_t>(name, v);
      else if (name == "solver.max_inner_iterations") c.solver.max_inner_iterations = to_integer<std::size_t>(name, v);
      else if (name == "solver.dinkelbach_tolerance") c.solver.dinkelbach_tolerance = to_double(name, v);
      else if (name == "solver.max_outer_iterations") c.solver.max_outer_iterations = to_integer<std::size_t>(name, v);
      else if (name == "solver.seed") c.solver.seed = to_integer<std::uint64_t>(name, v);
      else if (name == "dtpc.opportunism_scale") c.opportunism_scale = to_double(name, v);
      else throw ConfigError(fmt::format("unknown config key '{}'", name));
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ExperimentConfig& c) {
  std::vector<std::string_view> algos;
  for (auto a : c.algorithms) algos.push_back(to_string(a));
  return fmt::format(
      "[cell]\n"
      "radius_m = {}\n"
      "pl0_db = {}\n"
      "pathloss_exponent = {}\n"
      "min_distance_m = {}\n"
      "ue_count = {}\n"
      "\n[radio]\n"
      "circuit_power_bs_dbm = {}\n"
      "circuit_power_ue_dbm = {}\n"
      "amp_inefficiency = {}\n"
      "max_power_dbm = {}\n"
      "noise_power_dbm = {}\n"
      "\n[experiment]\n"
      "target_sinr_db = {}\n"
      "snapshots = {}\n"
      "seed = {}\n"
      "algorithms = {}\n"
      "workers = {}\n"
      "delta_policy = {}\n"
      "\n[iteration]\n"
      "tolerance = {}\n"
      "max_iterations = {}\n"
      "initial_fraction = {}\n"
      "\n[solver]\n"
      "random_starts = {}\n"
      "max_inner_iterations = {}\n"
      "dinkelbach_tolerance = {}\n"
      "max_outer_iterations = {}\n"
      "seed = {}\n"
      "\n[dtpc]\n"
      "opportunism_scale = {}\n",
      c.geometry.radius_m, c.geometry.pl0_db, c.geometry.exponent, c.geometry.min_distance_m,
      c.ue_count, c.radio.circuit_power_bs_dbm, c.radio.circuit_power_ue_dbm,
      c.radio.amp_inefficiency, c.radio.max_power_dbm, c.radio.noise_power_dbm,
      fmt::join(c.target_sinr_db, ", "), c.snapshots, c.master_seed, fmt::join(algos, ","),
      c.workers,
      c.delta_policy == DeltaPolicy::per_snapshot ? "per_snapshot" : "per_configuration",
      c.iteration.tolerance, c.iteration.max_iterations, c.iteration.initial_fraction,
      c.solver.random_starts, c.solver.max_inner_iterations, c.solver.dinkelbach_tolerance,
      c.solver.max_outer_iterations, c.solver.seed, c.opportunism_scale);
}

}  // namespace geepc
