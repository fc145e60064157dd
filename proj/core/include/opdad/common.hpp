// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_COMMON_HPP
#define OPDAD_COMMON_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace opdad {

inline constexpr double kPi = std::numbers::pi;

/// Thrown by every precondition / config validation failure in the library.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical contract breaks at runtime (indefinite covariance,
/// degenerate spectrum, bound hypothesis violation, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

inline double deg_to_rad(double degrees) { return degrees * kPi / 180.0; }
inline double rad_to_deg(double radians) { return radians * 180.0 / kPi; }

/// dBm -> linear watts.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace opdad

#endif  // OPDAD_COMMON_HPP
