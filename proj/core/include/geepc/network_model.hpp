#pragma once

// Single-cell uplink: one base station at the origin, K user equipments (UEs)
// sharing the band. Everything is in linear units (watts, linear gains);
// conversions from dB/dBm happen at the configuration boundary.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace geepc {

/// Transmit power per UE in watts.
using PowerVector = std::vector<double>;
/// Per-UE linear SINR values (targets or achieved).
using SinrVector = std::vector<double>;

struct CellGeometry {
  double radius_m = 100.0;       ///< half-side of the square cell
  double pl0_db = 76.0;          ///< constant path-loss coefficient
  double exponent = 3.0;         ///< path-loss exponent
  double min_distance_m = 1.0;   ///< floor on the BS-UE distance
};

/// Radio constants in linear units.
struct RadioConstants {
  double circuit_power_bs_w = 1.0;   ///< 30 dBm
  double circuit_power_ue_w = 0.1;   ///< 20 dBm
  double amp_inefficiency = 5.0;
  double max_power_w = 0.19952623149688797;  ///< 23 dBm
  double noise_power_w = 5.011872336272715e-15;  ///< -113 dBm
};

struct NetworkSnapshot {
  std::size_t k = 0;
  std::vector<double> gains;
  double noise_power = 0.0;
  std::vector<double> max_power;
  double circuit_power_bs = 0.0;
  std::vector<double> circuit_power_ue;
  std::vector<double> amp_inefficiency;
  std::vector<double> distances;
  std::uint64_t seed = 0;

  /// Throws InvalidParameter when an invariant does not hold.
  void validate() const;
  /// P_BS^C + sum P_i^C.
  double static_power() const;
};

/// Builds a snapshot with explicit gains; every UE shares `radio`.
/// Distances are not known and are left at 1 m.
NetworkSnapshot make_snapshot(std::span<const double> gains, const RadioConstants& radio);

struct LinkMetrics {
  SinrVector sinr;
  std::vector<double> eff_interference;  ///< watts
  std::vector<double> throughput;        ///< bits/s/Hz
  double total_throughput = 0.0;
  double total_power = 0.0;              ///< watts
  double gee = 0.0;                      ///< bits/J/Hz
};

/// Path-loss gain 10^(-(PL0 + 10 theta log10 d)/10).
double path_gain(const CellGeometry& geometry, double distance_m);

/// UEs uniform over the square [-radius, radius]^2 around the BS.
/// Pure function of its arguments.
NetworkSnapshot generate_snapshot(const CellGeometry& geometry, std::size_t k,
                                  const RadioConstants& radio, std::uint64_t seed);

/// Received interference plus noise I_i = sum_{j != i} p_j h_j + sigma^2.
std::vector<double> interference(const NetworkSnapshot& snapshot, std::span<const double> p);

SinrVector sinr(const NetworkSnapshot& snapshot, std::span<const double> p);

/// phi_i = I_i / h_i. Small phi means a good channel.
std::vector<double> effective_interference(const NetworkSnapshot& snapshot,
                                           std::span<const double> p);

/// phi_i = p_i / gamma_i: what a UE can compute from its own power and the
/// SINR fed back by the BS. Throws UndefinedLocalCsi for gamma_i <= 0.
double local_effective_interference(double p_i, double sinr_i);

double total_power(const NetworkSnapshot& snapshot, std::span<const double> p);

LinkMetrics metrics(const NetworkSnapshot& snapshot, std::span<const double> p);

/// Throws InvalidParameter if `p` has the wrong length or leaves [0, p_max].
void check_power_vector(const NetworkSnapshot& snapshot, std::span<const double> p);

}  // namespace geepc
