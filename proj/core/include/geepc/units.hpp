#pragma once

#include <cmath>
#include <limits>

namespace geepc {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline double db_to_linear(double db) {
  if (std::isinf(db) && db < 0) return 0.0;
  return std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double linear) {
  if (linear <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(linear);
}

}  // namespace geepc
