#pragma once

/**
 * @file kernels.hpp
 * @brief Single-step root-finding kernels.
 *
 * Every method here moves x by the Newton step -f/f' scaled by a multiplier
 * that depends only on the dimensionless curvature ratio q = f f'' / f'^2:
 *
 *   newton   1
 *   halley   1 / (1 - q/2)
 *   hnr1     (e^q - 1) / q
 *   hnr2     1 + (q/2)(1 + q/3)   for q >= 0
 *            1 / (1 - q/2)        for q <= 0
 *
 * All functions are pure.
 */

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "rootkit/errors.hpp"
#include "rootkit/jet.hpp"

namespace rootkit {

enum class Method { newton, halley, hnr1, hnr2 };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::newton: return "newton";
    case Method::halley: return "halley";
    case Method::hnr1: return "hnr1";
    case Method::hnr2: return "hnr2";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  if (name == "newton") return Method::newton;
  if (name == "halley") return Method::halley;
  if (name == "hnr1") return Method::hnr1;
  if (name == "hnr2") return Method::hnr2;
  return std::nullopt;
}

/// The curvature ratio q on the extended real line.
///
/// At a turning point (f' = 0) the sign of f f'' decides between +inf and
/// -inf; when f f'' is also zero the ratio is indeterminate.
class Curvature {
 public:
  enum class Kind { finite, pos_inf, neg_inf, indeterminate };

  static Curvature finite(double q) { return Curvature(Kind::finite, q); }
  static Curvature pos_inf() {
    return Curvature(Kind::pos_inf, std::numeric_limits<double>::infinity());
  }
  static Curvature neg_inf() {
    return Curvature(Kind::neg_inf, -std::numeric_limits<double>::infinity());
  }
  static Curvature indeterminate() {
    return Curvature(Kind::indeterminate, std::numeric_limits<double>::quiet_NaN());
  }
  /// Classifies a raw double: NaN is indeterminate, infinities keep their sign.
  static Curvature of(double q) {
    if (std::isnan(q)) return indeterminate();
    if (q == std::numeric_limits<double>::infinity()) return pos_inf();
    if (q == -std::numeric_limits<double>::infinity()) return neg_inf();
    return finite(q);
  }

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::finite; }
  /// The numeric value; +-inf for the infinite kinds, NaN when indeterminate.
  double value() const noexcept { return value_; }

  friend bool operator==(const Curvature& a, const Curvature& b) {
    return a.kind_ == b.kind_ && (a.kind_ == Kind::indeterminate || a.value_ == b.value_);
  }

 private:
  Curvature(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

inline std::string to_string(const Curvature& q) {
  switch (q.kind()) {
    case Curvature::Kind::pos_inf: return "+inf";
    case Curvature::Kind::neg_inf: return "-inf";
    case Curvature::Kind::indeterminate: return "indeterminate";
    case Curvature::Kind::finite: break;
  }
  return std::to_string(q.value());
}

inline Curvature curvature_q(const Jet2& j) {
  const double num = j.value() * j.d2();
  if (j.d1() == 0.0) {
    if (num > 0.0) return Curvature::pos_inf();
    if (num < 0.0) return Curvature::neg_inf();
    return Curvature::indeterminate();
  }
  if (num == 0.0) return Curvature::finite(0.0);
  // d1*d1 may underflow; the quotient then saturates to the signed infinity.
  return Curvature::of(num / (j.d1() * j.d1()));
}

/// Largest t for which e^t is representable in double precision.
inline constexpr double max_exp_argument = 709.0;

/// (e^t - 1)/t, evaluated through expm1 so it keeps full precision near 0.
/// Returns 0 at t = -inf and throws overflow_error for t > 709.
inline double exp_multiplier(double t) {
  if (std::isnan(t)) throw undefined_step_error("exp_multiplier: NaN argument");
  if (t == -std::numeric_limits<double>::infinity()) return 0.0;
  if (t > max_exp_argument) {
    throw overflow_error("exp_multiplier: e^t overflows for t = " + std::to_string(t), t);
  }
  if (std::fabs(t) < 1e-300) return 1.0;
  return std::expm1(t) / t;
}

inline double pade_multiplier(const Curvature& q) {
  switch (q.kind()) {
    case Curvature::Kind::indeterminate:
      throw undefined_step_error("pade_multiplier: indeterminate q");
    case Curvature::Kind::pos_inf: return std::numeric_limits<double>::infinity();
    case Curvature::Kind::neg_inf: return 0.0;
    case Curvature::Kind::finite: break;
  }
  const double v = q.value();
  if (v >= 0.0) return 1.0 + (v / 2.0) * (1.0 + v / 3.0);
  return 1.0 / (1.0 - v / 2.0);
}

inline double pade_multiplier(double q) { return pade_multiplier(Curvature::of(q)); }

struct HalleyMultiplier {
  double value;
  bool direction_reversed;
};

/// 1/(1 - q/2). For q > 2 the multiplier is negative and the step points the
/// wrong way; that is reported, not refused. q = 2 itself is a pole.
inline HalleyMultiplier halley_multiplier(const Curvature& q) {
  switch (q.kind()) {
    case Curvature::Kind::indeterminate:
      throw undefined_step_error("halley_multiplier: indeterminate q");
    case Curvature::Kind::pos_inf: return {-0.0, true};
    case Curvature::Kind::neg_inf: return {0.0, false};
    case Curvature::Kind::finite: break;
  }
  const double v = q.value();
  if (v == 2.0) throw pole_error("halley_multiplier: pole at q = 2");
  const double m = 1.0 / (1.0 - v / 2.0);
  return {m, m < 0.0};
}

inline HalleyMultiplier halley_multiplier(double q) { return halley_multiplier(Curvature::of(q)); }

struct StepDiagnostics {
  Curvature q = Curvature::finite(0.0);
  double multiplier = 1.0;
  double newton_step = 0.0;   // -f/f'
  double applied_step = 0.0;  // x_next - x
  bool direction_reversed = false;
  bool stationary = false;    // applied_step == 0
};

struct StepResult {
  double x_next;
  StepDiagnostics diag;
};

/// One iteration of `method` from x, given the jet of f at x.
///
/// For the curvature-corrected methods a turning point with f f'' < 0
/// (q = -inf) takes the limiting step 2 f'/f'', which is zero when f' is
/// exactly zero. q = +inf has no limit and raises undefined_step_error.
inline StepResult step(Method method, double x, const Jet2& j) {
  StepDiagnostics d;
  d.q = curvature_q(j);

  if (method == Method::newton) {
    if (j.d1() == 0.0) throw undefined_step_error("newton: f'(x) = 0");
    d.multiplier = 1.0;
    d.newton_step = -j.value() / j.d1();
    d.applied_step = d.newton_step;
  } else {
    switch (d.q.kind()) {
      case Curvature::Kind::pos_inf:
        throw undefined_step_error("q = +inf at a turning point with f f'' > 0");
      case Curvature::Kind::indeterminate:
        throw undefined_step_error("q is indeterminate (f' = 0 and f f'' = 0)");
      case Curvature::Kind::neg_inf:
        d.multiplier = 0.0;
        d.newton_step = -j.value() / j.d1();
        d.applied_step = 2.0 * j.d1() / j.d2();
        break;
      case Curvature::Kind::finite:
        switch (method) {
          case Method::hnr1: d.multiplier = exp_multiplier(d.q.value()); break;
          case Method::hnr2: d.multiplier = pade_multiplier(d.q); break;
          case Method::halley: {
            const auto h = halley_multiplier(d.q);
            d.multiplier = h.value;
            d.direction_reversed = h.direction_reversed;
            break;
          }
          case Method::newton: break;
        }
        d.newton_step = -j.value() / j.d1();
        d.applied_step = d.newton_step * d.multiplier;
        break;
    }
  }
  d.stationary = d.applied_step == 0.0;
  return {x + d.applied_step, d};
}

}  // namespace rootkit
