#pragma once

/**
 * @file problems.hpp
 * @brief Built-in test problems with closed-form derivatives.
 *
 * Each entry carries its formula in the expression grammar of expr.hpp, so
 * the hand-written derivatives can be cross-checked against autodiff.
 */

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rootkit/errors.hpp"
#include "rootkit/format.hpp"
#include "rootkit/jet.hpp"

namespace rootkit {

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return x > lo && x < hi; }
  static Interval real_line() { return {}; }
};

struct ProblemSpec {
  std::string name;
  std::string formula;
  std::function<Jet2(double)> evaluator;
  Interval domain;
  std::vector<double> known_roots;
  std::string notes;

  Jet2 operator()(double x) const { return evaluator(x); }
};

namespace detail {
inline std::string paren(double v) { return "(" + format_shortest(v) + ")"; }
}  // namespace detail

inline ProblemSpec sqrt612() {
  return {"sqrt612", "x^2 - 612",
          [](double x) { return Jet2(x * x - 612.0, 2.0 * x, 2.0); },
          Interval::real_line(),
          {std::sqrt(612.0)},
          "x^2 - 612; quadratic, used for convergence-rate comparisons"};
}

inline ProblemSpec tanh_problem() {
  return {"tanh", "tanh(x)",
          [](double x) {
            const double t = std::tanh(x);
            const double sech2 = 1.0 - t * t;
            return Jet2(t, sech2, -2.0 * t * sech2);
          },
          Interval::real_line(),
          {0.0},
          "tanh x; Newton 2-cycles beyond |x0| ~ 1.088659"};
}

inline ProblemSpec cubic_cycle() {
  return {"cubic_cycle", "x^3 - 2*x + 2",
          [](double x) {
            const double x2 = x * x;
            return Jet2(x2 * x - 2.0 * x + 2.0, 3.0 * x2 - 2.0, 6.0 * x);
          },
          Interval::real_line(),
          {-1.7692923542386314},
          "x^3 - 2x + 2; Newton 2-cycle between 0 and 1, turning points at +-sqrt(2/3)"};
}

inline ProblemSpec fractal_cubic() {
  return {"fractal_cubic", "x^3 - 2*x^2 - 11*x + 12",
          [](double x) {
            const double x2 = x * x;
            return Jet2(x2 * x - 2.0 * x2 - 11.0 * x + 12.0, 3.0 * x2 - 4.0 * x - 11.0,
                        6.0 * x - 4.0);
          },
          Interval::real_line(),
          {-3.0, 1.0, 4.0},
          "x^3 - 2x^2 - 11x + 12 = (x+3)(x-1)(x-4); fractal Newton basins"};
}

/// f(x) = a log(bx + c); root (1 - c)/b, domain bx + c > 0.
inline ProblemSpec log_family(double a, double b, double c) {
  if (a == 0.0 || b == 0.0) throw config_error("log_family: a and b must be nonzero");
  const double edge = -c / b;
  Interval dom = b > 0.0 ? Interval{edge, std::numeric_limits<double>::infinity()}
                         : Interval{-std::numeric_limits<double>::infinity(), edge};
  return {"log_family",
          detail::paren(a) + "*log(" + detail::paren(b) + "*x+" + detail::paren(c) + ")",
          [a, b, c](double x) {
            const double u = b * x + c;
            if (!(u > 0.0)) throw domain_error("log_family: b*x + c <= 0");
            return Jet2(a * std::log(u), a * b / u, -a * b * b / (u * u));
          },
          dom,
          {(1.0 - c) / b},
          "a log(bx + c); hnr1 is exact in one step"};
}

/// f(x) = (alpha x + beta)/(gamma x + delta); the domain is the side of the
/// pole that contains the root.
inline ProblemSpec mobius(double alpha, double beta, double gamma, double delta) {
  const double det = alpha * delta - beta * gamma;
  if (det == 0.0) throw config_error("mobius: alpha*delta - beta*gamma must be nonzero");
  if (alpha == 0.0) throw config_error("mobius: alpha = 0 has no root");
  const double root = -beta / alpha;
  Interval dom = Interval::real_line();
  if (gamma != 0.0) {
    const double pole = -delta / gamma;
    dom = root > pole ? Interval{pole, std::numeric_limits<double>::infinity()}
                      : Interval{-std::numeric_limits<double>::infinity(), pole};
  }
  return {"mobius",
          "(" + detail::paren(alpha) + "*x+" + detail::paren(beta) + ")/(" +
              detail::paren(gamma) + "*x+" + detail::paren(delta) + ")",
          [=](double x) {
            const double den = gamma * x + delta;
            if (den == 0.0) throw domain_error("mobius: pole");
            return Jet2((alpha * x + beta) / den, det / (den * den),
                        -2.0 * gamma * det / (den * den * den));
          },
          dom,
          {root},
          "(alpha x + beta)/(gamma x + delta); halley is exact in one step"};
}

/// f(x) = alpha x + beta.
inline ProblemSpec affine(double alpha, double beta) {
  if (alpha == 0.0) throw config_error("affine: alpha must be nonzero");
  return {"affine", detail::paren(alpha) + "*x+" + detail::paren(beta),
          [=](double x) { return Jet2(alpha * x + beta, alpha, 0.0); },
          Interval::real_line(),
          {-beta / alpha},
          "alpha x + beta; newton is exact in one step"};
}

/// Every built-in problem, parameterized families at their default parameters.
inline std::vector<ProblemSpec> catalog() {
  return {sqrt612(),
          tanh_problem(),
          cubic_cycle(),
          fractal_cubic(),
          log_family(1.5, 2.0, 0.25),
          mobius(1.0, -2.0, 1.0, 3.0),
          affine(2.0, -3.0)};
}

/// Looks up a catalog entry by name. Parameterized families take their
/// parameters from `params` (a,b,c / alpha,beta,gamma,delta / alpha,beta);
/// an empty list selects the defaults.
inline std::optional<ProblemSpec> make_problem(std::string_view name,
                                               const std::vector<double>& params = {}) {
  auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw config_error(std::string(name) + " takes " + std::to_string(n) + " parameters");
    }
  };
  if (name == "log_family" && !params.empty()) {
    need(3);
    return log_family(params[0], params[1], params[2]);
  }
  if (name == "mobius" && !params.empty()) {
    need(4);
    return mobius(params[0], params[1], params[2], params[3]);
  }
  if (name == "affine" && !params.empty()) {
    need(2);
    return affine(params[0], params[1]);
  }
  for (auto& p : catalog()) {
    if (p.name == name) {
      if (!params.empty()) throw config_error(p.name + " takes no parameters");
      return std::move(p);
    }
  }
  return std::nullopt;
}

}  // namespace rootkit
