#pragma once

#include <cmath>

namespace udn {

// Human-facing quantities are dB/dBm; everything inside the library is linear
// (watts, ratios) and distances are kilometres.

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline constexpr double meters_to_km(double m) { return m * 1e-3; }

inline constexpr double km_to_meters(double km) { return km * 1e3; }

}  // namespace udn
