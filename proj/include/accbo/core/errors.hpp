#pragma once

#include <stdexcept>
#include <string>

namespace accbo {

/// A precondition or invariant on inputs was violated (bad constants, mismatched
/// dimensions, out-of-range schedule values).
class ConstraintViolation : public std::invalid_argument {
 public:
  explicit ConstraintViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// A run produced a non-finite value and was stopped.
class NumericalAbort : public std::runtime_error {
 public:
  explicit NumericalAbort(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConstraintViolation(message);
}

}  // namespace accbo
