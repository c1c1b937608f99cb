#include "geepc/network_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "geepc/errors.hpp"
#include "geepc/rng.hpp"

namespace geepc {

namespace {

void check_length(const NetworkSnapshot& snapshot, std::span<const double> p) {
  if (p.size() != snapshot.k) {
    throw InvalidParameter(
        fmt::format("power vector has {} entries, snapshot has {} UEs", p.size(), snapshot.k));
  }
}

}  // namespace

void NetworkSnapshot::validate() const {
  if (k == 0) throw InvalidParameter("snapshot needs at least one UE");
  const auto sized = [this](const std::vector<double>& v) { return v.size() == k; };
  if (!sized(gains) || !sized(max_power) || !sized(circuit_power_ue) ||
      !sized(amp_inefficiency) || !sized(distances)) {
    throw InvalidParameter("per-UE arrays must all have length k");
  }
  if (!(noise_power > 0.0)) throw InvalidParameter("noise power must be positive");
  if (!(circuit_power_bs >= 0.0)) throw InvalidParameter("BS circuit power must be >= 0");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(gains[i] > 0.0) || !std::isfinite(gains[i]))
      throw InvalidParameter(fmt::format("gain of UE {} must be positive", i));
    if (!(max_power[i] > 0.0)) throw InvalidParameter(fmt::format("cap of UE {} must be positive", i));
    if (!(circuit_power_ue[i] >= 0.0))
      throw InvalidParameter(fmt::format("circuit power of UE {} must be >= 0", i));
    if (!(amp_inefficiency[i] >= 1.0))
      throw InvalidParameter(fmt::format("amplifier inefficiency of UE {} must be >= 1", i));
  }
}

double NetworkSnapshot::static_power() const {
  return circuit_power_bs + std::accumulate(circuit_power_ue.begin(), circuit_power_ue.end(), 0.0);
}

NetworkSnapshot make_snapshot(std::span<const double> gains, const RadioConstants& radio) {
  NetworkSnapshot s;
  s.k = gains.size();
  s.gains.assign(gains.begin(), gains.end());
  s.noise_power = radio.noise_power_w;
  s.max_power.assign(s.k, radio.max_power_w);
  s.circuit_power_bs = radio.circuit_power_bs_w;
  s.circuit_power_ue.assign(s.k, radio.circuit_power_ue_w);
  s.amp_inefficiency.assign(s.k, radio.amp_inefficiency);
  s.distances.assign(s.k, 1.0);
  s.validate();
  return s;
}

double path_gain(const CellGeometry& geometry, double distance_m) {
  const double loss_db = geometry.pl0_db + 10.0 * geometry.exponent * std::log10(distance_m);
  return std::pow(10.0, -loss_db / 10.0);
}

NetworkSnapshot generate_snapshot(const CellGeometry& geometry, std::size_t k,
                                  const RadioConstants& radio, std::uint64_t seed) {
  if (k == 0) throw InvalidParameter("UE count must be positive");
  if (!(geometry.radius_m > 0.0)) throw InvalidParameter("cell radius must be positive");
  if (!(geometry.exponent > 0.0)) throw InvalidParameter("path-loss exponent must be positive");
  if (!(geometry.min_distance_m > 0.0)) throw InvalidParameter("minimum distance must be positive");

  Rng rng(seed);
  std::vector<double> gains(k), distances(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double x = rng.uniform(-geometry.radius_m, geometry.radius_m);
    const double y = rng.uniform(-geometry.radius_m, geometry.radius_m);
    distances[i] = std::max(std::hypot(x, y), geometry.min_distance_m);
    gains[i] = path_gain(geometry, distances[i]);
  }
  NetworkSnapshot s = make_snapshot(gains, radio);
  s.distances = std::move(distances);
  s.seed = seed;
  return s;
}

std::vector<double> interference(const NetworkSnapshot& snapshot, std::span<const double> p) {
  check_length(snapshot, p);
  std::vector<double> out(snapshot.k);
  // Summed per UE rather than total-minus-own: the subtraction cancels
  // badly when one UE dominates the received power.
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    double others = 0.0;
    for (std::size_t j = 0; j < snapshot.k; ++j)
      if (j != i) others += p[j] * snapshot.gains[j];
    out[i] = others + snapshot.noise_power;
  }
  return out;
}

SinrVector sinr(const NetworkSnapshot& snapshot, std::span<const double> p) {
  auto out = interference(snapshot, p);
  for (std::size_t i = 0; i < snapshot.k; ++i) out[i] = p[i] * snapshot.gains[i] / out[i];
  return out;
}

std::vector<double> effective_interference(const NetworkSnapshot& snapshot,
                                           std::span<const double> p) {
  auto out = interference(snapshot, p);
  for (std::size_t i = 0; i < snapshot.k; ++i) out[i] /= snapshot.gains[i];
  return out;
}

double local_effective_interference(double p_i, double sinr_i) {
  if (!(sinr_i > 0.0)) {
    throw UndefinedLocalCsi(fmt::format("local effective interference needs SINR > 0, got {}", sinr_i));
  }
  return p_i / sinr_i;
}

double total_power(const NetworkSnapshot& snapshot, std::span<const double> p) {
  check_length(snapshot, p);
  double transmit = 0.0;
  for (std::size_t i = 0; i < snapshot.k; ++i) transmit += snapshot.amp_inefficiency[i] * p[i];
  return snapshot.static_power() + transmit;
}

LinkMetrics metrics(const NetworkSnapshot& snapshot, std::span<const double> p) {
  LinkMetrics m;
  m.eff_interference = effective_interference(snapshot, p);
  m.sinr.resize(snapshot.k);
  m.throughput.resize(snapshot.k);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    m.sinr[i] = p[i] / m.eff_interference[i];
    m.throughput[i] = std::log2(1.0 + m.sinr[i]);
    m.total_throughput += m.throughput[i];
  }
  m.total_power = total_power(snapshot, p);
  m.gee = m.total_throughput / m.total_power;
  return m;
}

void check_power_vector(const NetworkSnapshot& snapshot, std::span<const double> p) {
  check_length(snapshot, p);
  for (std::size_t i = 0; i < snapshot.k; ++i) {
    if (!(p[i] >= 0.0) || p[i] > snapshot.max_power[i]) {
      throw InvalidParameter(
          fmt::format("power of UE {} is {} W, outside [0, {}]", i, p[i], snapshot.max_power[i]));
    }
  }
}

}  // namespace geepc
