#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trajexp {

inline constexpr const char* kVersion = "0.1.0";

using VecD = std::vector<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments to a library operation (empty generator list, gamma <= 0, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Malformed config or field file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Integration horizon too short for the requested limit-point accuracy.
class HorizonError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: step-size underflow, non-finite state.
class NumericsError : public Error {
 public:
  using Error::Error;
};

class CflError : public Error {
 public:
  CflError(const std::string& msg, double suggested)
      : Error(msg), suggested_dt(suggested) {}
  double suggested_dt;
};

std::uint64_t fnv1a64(std::string_view s);
std::string fnv1a64_hex(std::string_view s);

}  // namespace trajexp
