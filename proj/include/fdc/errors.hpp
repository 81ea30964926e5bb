#pragma once

#include <stdexcept>
#include <string>

namespace fdc {

// Violated input contract of a library operation (CLI exit code 3).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdown that cannot be expressed as a return flag
// (e.g. a singular linear system from a degenerate domain).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw PreconditionError(msg);
}

}  // namespace fdc
