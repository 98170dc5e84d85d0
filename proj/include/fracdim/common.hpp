#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace fracdim {

inline constexpr double kPi = 3.14159265358979323846;

/// Malformed or inconsistent input data (files, CSV, image headers, flags).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (rank deficiency, non-finite quadrature, flat spectrum).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Round-trip-safe decimal rendering of a double (17 significant digits).
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace fracdim
