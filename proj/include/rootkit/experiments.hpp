#pragma once

/**
 * @file experiments.hpp
 * @brief The four worked examples (x^2 - 612, tanh, the turning-point cubic,
 *        the fractal cubic) as runnable checks with measured values.
 */

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rootkit/analysis.hpp"
#include "rootkit/format.hpp"
#include "rootkit/solver.hpp"

namespace rootkit {

struct Check {
  std::string name;
  bool pass = false;
  std::string measured;
};

namespace experiments {

inline std::string sci3(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(2);
  os << v;
  return os.str();
}

/// True when `got` agrees with `want` to three significant figures.
inline bool same_3sf(double got, double want) { return sci3(got) == sci3(want); }

inline std::vector<double> trace_errors(const SolveReport& r, double root) {
  std::vector<double> e;
  for (const auto& t : r.trace) e.push_back(t.x - root);
  return e;
}

/// Checks that the error sequence of `r` reproduces `want` to 3 significant
/// figures, followed by one iterate at machine precision (relative 1e-15).
inline Check error_sequence(const std::string& name, const SolveReport& r, double root,
                            const std::vector<double>& want) {
  const auto e = trace_errors(r, root);
  std::ostringstream m;
  bool pass = r.status.converged() && e.size() == want.size() + 1;
  for (std::size_t i = 0; i < e.size(); ++i) {
    m << (i ? " " : "") << sci3(e[i]);
    if (i < want.size() && i < e.size()) pass = pass && same_3sf(e[i], want[i]);
  }
  if (!e.empty()) {
    const double last = std::fabs(e.back());
    pass = pass && last / std::fabs(root) < 1e-15;
    m << " (final |err| " << sci3(last) << ", relative " << sci3(last / std::fabs(root)) << ")";
  }
  return {name, pass, m.str()};
}

inline std::vector<Check> sqrt612_experiment() {
  std::vector<Check> out;
  const auto p = sqrt612();
  const double root = p.known_roots[0];

  SolverConfig newton;
  newton.method = Method::newton;
  const auto rn = solve(p, 10.0, newton);
  out.push_back(error_sequence("newton error sequence", rn, root,
                               {-1.47e1, 1.09e1, 1.66e0, 5.20e-2, 5.45e-5, 6.01e-11}));

  SolverConfig hnr2;
  const auto rh = solve(p, 10.0, hnr2);
  out.push_back(
      error_sequence("hnr2 error sequence", rh, root, {-1.47e1, -3.51e0, -2.20e-2, -4.37e-9}));

  const double on = estimate_order(trace_errors(rn, root));
  out.push_back({"newton order in [1.7, 2.3]", on >= 1.7 && on <= 2.3, format_shortest(on)});
  const double oh = estimate_order(trace_errors(rh, root));
  out.push_back({"hnr2 order in [2.5, 3.5]", oh >= 2.5 && oh <= 3.5, format_shortest(oh)});
  return out;
}

inline std::vector<Check> tanh_basin_experiment() {
  std::vector<Check> out;
  const auto p = tanh_problem();

  const auto bn = find_boundary(p, Method::newton, 0.5, 2.0, 1e-6, basin_config(Method::newton));
  const double a = 0.5 * (bn.lo + bn.hi);
  out.push_back({"newton boundary 1.088659 +- 1e-5", std::fabs(a - 1.088659) <= 1e-5, format_sig17(a)});
  const double t = std::tanh(a);
  const double resid = std::fabs(t - 2.0 * a * (1.0 - t * t));
  out.push_back({"newton boundary solves tanh a = 2a sech^2 a to 1e-5", resid <= 1e-5, sci3(resid)});

  std::optional<double> b;
  std::string measured;
  try {
    const auto bh = find_boundary(p, Method::hnr2, 1.0, 4.0, 1e-6, basin_config(Method::hnr2));
    b = 0.5 * (bh.lo + bh.hi);
    measured = format_sig17(*b);
  } catch (const bracket_error& e) {
    measured = std::string("no boundary: ") + e.what();
  }
  out.push_back({"hnr2 boundary 2.410975 +- 1e-5", b && std::fabs(*b - 2.410975) <= 1e-5, measured});
  out.push_back({"hnr2 basin over twice newton's", b && *b / a > 2.0,
                 b ? format_shortest(*b / a) : std::string("n/a")});
  return out;
}

inline std::vector<Check> cubic_turning_experiment() {
  std::vector<Check> out;
  const auto p = cubic_cycle();
  const double root = p.known_roots[0];
  SolverConfig cfg;

  const auto fast = solve(p, 0.0625, cfg);
  std::optional<int> first_within;
  for (std::size_t i = 0; i < fast.trace.size(); ++i) {
    if (std::fabs(fast.trace[i].x - -1.769292) <= 1e-5) {
      first_within = static_cast<int>(i);
      break;
    }
  }
  std::ostringstream m1;
  m1 << to_string(fast.status) << ", root " << (fast.root ? format_sig17(*fast.root) : "none")
     << ", within 1e-5 at iteration " << (first_within ? std::to_string(*first_within) : "never")
     << ", " << fast.iterations << " iterations to tolerance";
  out.push_back({"x0=0.0625 converges to -1.769292 +- 1e-5 in 4 iterations",
                 fast.status.converged() && std::fabs(*fast.root - -1.769292) <= 1e-5 &&
                     first_within == 4,
                 m1.str()});

  const auto slow = solve(p, 0.125, cfg);
  std::ostringstream m2;
  m2 << to_string(slow.status) << ", " << slow.iterations << " iterations, max excursion "
     << sci3(slow.max_excursion);
  out.push_back({"x0=0.125 converges, excursion >= 1e9, iterations in [55, 85]",
                 slow.status.converged() && std::fabs(*slow.root - root) <= 1e-5 &&
                     slow.max_excursion >= 1e9 && slow.iterations >= 55 && slow.iterations <= 85,
                 m2.str()});

  const double tp = std::sqrt(2.0 / 3.0);
  const auto left = solve(p, -tp, cfg);
  out.push_back({"x0=-sqrt(2/3) is stationary", left.status.kind == Status::Kind::stationary,
                 to_string(left.status)});
  const auto right = solve(p, tp, cfg);
  out.push_back({"x0=+sqrt(2/3) is an undefined step",
                 right.status.kind == Status::Kind::undefined_step, to_string(right.status)});
  return out;
}

inline std::string describe_runs(const std::vector<Outcome>& runs, const ProblemSpec& p) {
  std::string s;
  for (const auto& o : runs) {
    if (!s.empty()) s += ",";
    s += o ? format_shortest(p.known_roots[*o]) : "none";
  }
  return s;
}

inline std::vector<Check> fractal_scan_experiment(unsigned threads = 1) {
  std::vector<Check> out;
  const auto p = fractal_cubic();

  const auto grid = arange(2.3528363, 2.35287527, 1e-8);
  const auto rows = sweep(p, Method::newton, grid, basin_config(Method::newton), threads);
  const auto runs = distinct_runs(rows);
  const std::vector<Outcome> want{1, 0, 2, 0, 2};  // 1, -3, 4, -3, 4
  out.push_back({"newton root sequence over [2.3528363, 2.35287527] is 1,-3,4,-3,4", runs == want,
                 describe_runs(runs, p) + " (" + std::to_string(grid.size()) + " points)"});

  const auto cfg = basin_config(Method::hnr2);
  const auto left = find_boundary(p, Method::hnr2, -2.0, -1.0, 1e-7, cfg);
  const auto right = find_boundary(p, Method::hnr2, 2.0, 3.0, 1e-7, cfg);
  const double l = 0.5 * (left.lo + left.hi), r = 0.5 * (right.lo + right.hi);
  out.push_back({"hnr2 boundary -1.360920 +- 1e-4", std::fabs(l - -1.360920) <= 1e-4, format_sig17(l)});
  out.push_back({"hnr2 boundary 2.694254 +- 1e-4", std::fabs(r - 2.694254) <= 1e-4, format_sig17(r)});

  // Each interval between (and beyond) the boundaries converges to one root.
  const double spans[3][2] = {{l - 10.0, left.lo}, {left.hi, right.lo}, {right.hi, r + 10.0}};
  for (const auto& s : spans) {
    const auto g = linspace(s[0], s[1], 1000);
    const auto rs = distinct_runs(sweep(p, Method::hnr2, g, cfg, threads));
    out.push_back({"hnr2 interval [" + format_shortest(s[0]) + ", " + format_shortest(s[1]) +
                       "] converges to a single root",
                   rs.size() == 1 && rs[0].has_value(), describe_runs(rs, p)});
  }
  return out;
}

inline const std::vector<std::string_view>& names() {
  static const std::vector<std::string_view> n{"sqrt612", "tanh-basin", "cubic-turning", "fractal-scan"};
  return n;
}

/// Runs the named experiment; nullopt for an unknown name.
inline std::optional<std::vector<Check>> run(std::string_view name, unsigned threads = 1) {
  if (name == "sqrt612") return sqrt612_experiment();
  if (name == "tanh-basin") return tanh_basin_experiment();
  if (name == "cubic-turning") return cubic_turning_experiment();
  if (name == "fractal-scan") return fractal_scan_experiment(threads);
  return std::nullopt;
}

}  // namespace experiments
}  // namespace rootkit
