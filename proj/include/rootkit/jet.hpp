#pragma once

#include <cmath>
#include <string>

#include "rootkit/errors.hpp"

namespace rootkit {

/// f(x), f'(x) and f''(x) at a single point.
///
/// Construction rejects non-finite components, so a Jet2 that exists is
/// always safe to feed into a step kernel.
class Jet2 {
 public:
  Jet2(double value, double d1, double d2) : value_(value), d1_(d1), d2_(d2) {
    if (!std::isfinite(value) || !std::isfinite(d1) || !std::isfinite(d2)) {
      throw non_finite_error("non-finite jet (" + std::to_string(value) + ", " +
                             std::to_string(d1) + ", " + std::to_string(d2) + ")");
    }
  }

  double value() const noexcept { return value_; }
  double d1() const noexcept { return d1_; }
  double d2() const noexcept { return d2_; }

  friend bool operator==(const Jet2&, const Jet2&) = default;

 private:
  double value_;
  double d1_;
  double d2_;
};

}  // namespace rootkit
