#pragma once

/**
 * @file solver.hpp
 * @brief Iteration driver over the step kernels.
 *
 * solve() repeatedly applies one kernel, records every iterate together with
 * its jet and step diagnostics, and classifies how the run ended. There is
 * no bracketing, damping or line search: the raw iteration is what gets
 * reported.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rootkit/errors.hpp"
#include "rootkit/jet.hpp"
#include "rootkit/kernels.hpp"
#include "rootkit/problems.hpp"

namespace rootkit {

struct SolverConfig {
  Method method = Method::hnr2;
  /// |f| threshold; unset means 1e-13 * max(1, |f(x0)|).
  std::optional<double> f_tol;
  double x_tol = 4.0 * std::numeric_limits<double>::epsilon();
  int max_iter = 200;
  int cycle_detection_window = 4;
  double cycle_tol = 1e-9;
  double divergence_bound = 1e308 / 4.0;

  void validate() const {
    if (f_tol && !(*f_tol > 0.0)) throw config_error("f_tol must be > 0");
    if (!(x_tol >= 0.0)) throw config_error("x_tol must be >= 0");
    if (max_iter < 1) throw config_error("max_iter must be >= 1");
    if (cycle_detection_window < 0 || cycle_detection_window > 8) {
      throw config_error("cycle_detection_window must be in [0, 8]");
    }
    if (!(cycle_tol >= 0.0)) throw config_error("cycle_tol must be >= 0");
    if (!(divergence_bound > 0.0)) throw config_error("divergence_bound must be > 0");
  }
};

inline double default_f_tol(double f0) { return 1e-13 * std::max(1.0, std::fabs(f0)); }

struct Status {
  enum class Kind {
    converged,
    max_iterations,
    cycle,
    diverged,
    undefined_step,
    stationary,
    overflow,     // exp multiplier overflowed (hnr1)
    domain_exit,  // an iterate left the problem's domain
    non_finite,   // f or a derivative evaluated to inf/NaN
  };

  Kind kind = Kind::max_iterations;
  int period = 0;  // cycle only

  bool converged() const noexcept { return kind == Kind::converged; }
  friend bool operator==(const Status&, const Status&) = default;
};

inline std::string to_string(const Status& s) {
  switch (s.kind) {
    case Status::Kind::converged: return "converged";
    case Status::Kind::max_iterations: return "max_iterations";
    case Status::Kind::cycle: return "cycle(" + std::to_string(s.period) + ")";
    case Status::Kind::diverged: return "diverged";
    case Status::Kind::undefined_step: return "undefined_step";
    case Status::Kind::stationary: return "stationary";
    case Status::Kind::overflow: return "overflow";
    case Status::Kind::domain_exit: return "domain_exit";
    case Status::Kind::non_finite: return "non_finite";
  }
  return "?";
}

struct TraceEntry {
  double x;
  Jet2 jet;
  std::optional<StepDiagnostics> step;  // absent on the final iterate
};

struct SolveReport {
  Status status;
  std::optional<double> root;
  int iterations = 0;
  std::vector<TraceEntry> trace;  // iterations + 1 entries
  double max_excursion = 0.0;
  double f_tol = 0.0;             // the tolerance actually used
  std::string detail;             // why a non-converged run stopped
};

namespace detail {

inline bool cycle_of_period(std::span<const double> xs, int p, double tol) {
  const auto n = xs.size();
  for (std::size_t k = n - 2 * p; k < n - p; ++k) {
    if (std::fabs(xs[k + p] - xs[k]) > tol * (1.0 + std::fabs(xs[k]))) return false;
  }
  return true;
}

// Within the last period, at least one pair of neighbours must be distinct;
// otherwise the "cycle" is a stalled or converging sequence.
inline bool has_distinct_points(std::span<const double> xs, int p, double tol) {
  const auto n = xs.size();
  for (std::size_t k = n - p - 1; k + 1 < n; ++k) {
    if (std::fabs(xs[k + 1] - xs[k]) > tol * (1.0 + std::fabs(xs[k]))) return true;
  }
  return false;
}

}  // namespace detail

/// Smallest period p <= window such that the last 2p values repeat with
/// period p to within tol (relative, 1 + |x| scaled). Periods longer than
/// half the trace are not probed.
inline std::optional<int> classify_cycle(std::span<const double> xs, int window, double tol) {
  for (int p = 1; p <= window && 2 * static_cast<std::size_t>(p) <= xs.size(); ++p) {
    if (detail::cycle_of_period(xs, p, tol)) return p;
  }
  return std::nullopt;
}

inline SolveReport solve(const ProblemSpec& problem, double x0, const SolverConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(x0)) throw config_error("x0 must be finite");
  if (!problem.domain.contains(x0)) {
    throw domain_error("x0 = " + std::to_string(x0) + " is outside the domain of " + problem.name);
  }

  SolveReport r;
  r.trace.push_back({x0, problem(x0), std::nullopt});
  r.f_tol = cfg.f_tol.value_or(default_f_tol(r.trace.front().jet.value()));
  r.max_excursion = std::fabs(x0);
  const double f_tol_sqrt = std::sqrt(r.f_tol);

  std::vector<double> xs{x0};
  bool last_step_negligible = false;

  auto stop = [&r](Status::Kind k, std::string why = {}) {
    r.status.kind = k;
    r.detail = std::move(why);
  };

  for (;;) {
    const double x = r.trace.back().x;
    const Jet2 jet = r.trace.back().jet;
    const double abs_f = std::fabs(jet.value());

    if (abs_f <= r.f_tol) {
      stop(Status::Kind::converged);
      r.root = x;
      break;
    }
    if (last_step_negligible) {
      if (abs_f <= f_tol_sqrt) {
        stop(Status::Kind::converged);
        r.root = x;
      } else {
        stop(Status::Kind::stationary, "zero step at a non-root");
      }
      break;
    }
    if (cfg.cycle_detection_window >= 2) {
      bool found = false;
      for (int p = 2; p <= cfg.cycle_detection_window && 2 * static_cast<std::size_t>(p) <= xs.size();
           ++p) {
        if (detail::cycle_of_period(xs, p, cfg.cycle_tol) &&
            detail::has_distinct_points(xs, p, cfg.cycle_tol)) {
          stop(Status::Kind::cycle);
          r.status.period = p;
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (r.iterations >= cfg.max_iter) {
      stop(Status::Kind::max_iterations);
      break;
    }

    StepResult s{};
    try {
      s = step(cfg.method, x, jet);
    } catch (const overflow_error& e) {
      stop(Status::Kind::overflow, std::string(e.what()) + " (q = " + std::to_string(e.argument()) + ")");
      break;
    } catch (const undefined_step_error& e) {
      stop(Status::Kind::undefined_step, e.what());
      break;
    }
    r.trace.back().step = s.diag;

    const double x_next = s.x_next;
    if (!std::isfinite(x_next) || std::fabs(x_next) > cfg.divergence_bound) {
      stop(Status::Kind::diverged, "|x| exceeded " + std::to_string(cfg.divergence_bound));
      break;
    }
    if (!problem.domain.contains(x_next)) {
      stop(Status::Kind::domain_exit,
           "x = " + std::to_string(x_next) + " left the domain of " + problem.name);
      break;
    }

    std::optional<Jet2> next_jet;
    try {
      next_jet = problem(x_next);
    } catch (const non_finite_error& e) {
      stop(Status::Kind::non_finite, e.what());
      break;
    } catch (const domain_error& e) {
      stop(Status::Kind::domain_exit, e.what());
      break;
    }

    last_step_negligible = std::fabs(x_next - x) <= cfg.x_tol * (1.0 + std::fabs(x));
    r.trace.push_back({x_next, *next_jet, std::nullopt});
    xs.push_back(x_next);
    ++r.iterations;
    r.max_excursion = std::max(r.max_excursion, std::fabs(x_next));
  }
  return r;
}

}  // namespace rootkit
