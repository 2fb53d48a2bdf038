#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace freeprob {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Real value or a tagged +infinity that never enters arithmetic.
struct Extended {
  double value = 0.0;
  bool infinite = false;

  static Extended finite(double v) { return {v, false}; }
  static Extended plus_infinity() { return {0.0, true}; }
  bool is_finite() const { return !infinite; }
  double get() const {
    if (infinite) throw NumericalError("value is +infinity");
    return value;
  }
  std::string str() const;
};

// Reduce an angle to [-pi, pi).
inline double wrap_angle(double t) {
  double r = std::fmod(t + kPi, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r - kPi;
}

}  // namespace freeprob
