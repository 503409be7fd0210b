#pragma once

/**
 * @file analysis.hpp
 * @brief Experiments built on solve(): basin sweeps, basin-boundary
 *        bisection and empirical convergence order.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rootkit/errors.hpp"
#include "rootkit/solver.hpp"

namespace rootkit {

/// Which known root (if any) a run converged to. This is the predicate that
/// basins and boundaries are defined by.
using Outcome = std::optional<std::size_t>;

inline std::string to_string(const Outcome& o, const ProblemSpec& p) {
  if (!o) return "none";
  return "root " + format_shortest(p.known_roots[*o]);
}

struct SweepRow {
  double x0 = 0.0;
  Status status;
  std::optional<double> root;
  Outcome root_index;
  int iterations = 0;
  double max_excursion = 0.0;
};

struct BasinBoundary {
  double lo = 0.0;
  double hi = 0.0;
  Outcome lo_outcome;
  Outcome hi_outcome;
  std::string predicate;
};

/// Solver settings used for basin work: a 100-iteration cap separates
/// convergence from cycling escape cleanly.
inline SolverConfig basin_config(Method method) {
  SolverConfig cfg;
  cfg.method = method;
  cfg.max_iter = 100;
  return cfg;
}

/// Index of the known root within 1e-6 (1 + |root|) of x.
inline Outcome match_root(const ProblemSpec& p, double x) {
  for (std::size_t i = 0; i < p.known_roots.size(); ++i) {
    const double xi = p.known_roots[i];
    if (std::fabs(x - xi) <= 1e-6 * (1.0 + std::fabs(xi))) return i;
  }
  return std::nullopt;
}

inline SweepRow sweep_row(const ProblemSpec& p, double x0, const SolverConfig& cfg) {
  SweepRow row;
  row.x0 = x0;
  row.max_excursion = std::fabs(x0);
  try {
    const SolveReport rep = solve(p, x0, cfg);
    row.status = rep.status;
    row.root = rep.root;
    row.iterations = rep.iterations;
    row.max_excursion = rep.max_excursion;
    if (rep.status.converged()) row.root_index = match_root(p, *rep.root);
  } catch (const non_finite_error&) {
    row.status.kind = Status::Kind::non_finite;
  } catch (const domain_error&) {
    row.status.kind = Status::Kind::domain_exit;
  }
  return row;
}

inline Outcome outcome(const ProblemSpec& p, double x0, const SolverConfig& cfg) {
  return sweep_row(p, x0, cfg).root_index;
}

/// One independent solve per grid point, rows in grid order. `threads` > 1
/// fans the solves out; the result is identical to the sequential run.
inline std::vector<SweepRow> sweep(const ProblemSpec& p, Method method, std::span<const double> grid,
                                   SolverConfig cfg, unsigned threads = 1) {
  if (grid.empty()) throw config_error("sweep: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw config_error("sweep: grid must be strictly increasing");
  }
  cfg.method = method;
  cfg.validate();

  std::vector<SweepRow> rows(grid.size());
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(grid.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = sweep_row(p, grid[i], cfg);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < grid.size(); i = next++) rows[i] = sweep_row(p, grid[i], cfg);
    });
  }
  pool.clear();
  return rows;
}

/// `points` evenly spaced values from `from` to `to` inclusive.
inline std::vector<double> linspace(double from, double to, std::size_t points) {
  if (points < 2 || !(to > from)) throw config_error("linspace: need from < to and points >= 2");
  std::vector<double> g(points);
  const double h = (to - from) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = from + h * static_cast<double>(i);
  g.back() = to;
  return g;
}

/// Grid from `from` in increments of `step`, not exceeding `to`.
inline std::vector<double> arange(double from, double to, double step) {
  if (!(to > from) || !(step > 0.0)) throw config_error("arange: need from < to and step > 0");
  std::vector<double> g;
  for (std::size_t i = 0;; ++i) {
    const double x = from + step * static_cast<double>(i);
    if (x > to) break;
    g.push_back(x);
  }
  return g;
}

/// Run-length compression of the outcomes of consecutive rows.
inline std::vector<Outcome> distinct_runs(std::span<const SweepRow> rows) {
  std::vector<Outcome> runs;
  for (const auto& r : rows) {
    if (runs.empty() || runs.back() != r.root_index) runs.push_back(r.root_index);
  }
  return runs;
}

/// Bisects [lo, hi] on the outcome predicate until hi - lo <= resolution.
inline BasinBoundary find_boundary(const ProblemSpec& p, Method method, double lo, double hi,
                                   double resolution, SolverConfig cfg) {
  if (!(lo < hi)) throw config_error("find_boundary: need lo < hi");
  if (!(resolution > 0.0)) throw config_error("find_boundary: resolution must be > 0");
  cfg.method = method;
  const Outcome at_lo = outcome(p, lo, cfg);
  const Outcome at_hi = outcome(p, hi, cfg);
  if (at_lo == at_hi) {
    throw bracket_error("find_boundary: same outcome (" + to_string(at_lo, p) + ") at both ends of [" +
                        format_shortest(lo) + ", " + format_shortest(hi) + "]");
  }
  while (hi - lo > resolution) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    if (outcome(p, mid, cfg) == at_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Outcome final_hi = outcome(p, hi, cfg);
  return {lo, hi, at_lo, final_hi,
          "converged-root identity: " + to_string(at_lo, p) + " | " + to_string(final_hi, p)};
}

/// Empirical order log(e2/e1)/log(e1/e0) over the last admissible triple:
/// three consecutive, strictly decreasing magnitudes above 100 eps.
inline double estimate_order(std::span<const double> errors) {
  const double floor = 1e2 * std::numeric_limits<double>::epsilon();
  std::vector<double> e;
  for (double v : errors) {
    const double a = std::fabs(v);
    if (a > floor && std::isfinite(a)) e.push_back(a);
  }
  for (std::size_t i = e.size(); i >= 3; --i) {
    const double e0 = e[i - 3], e1 = e[i - 2], e2 = e[i - 1];
    if (e0 > e1 && e1 > e2) return std::log(e2 / e1) / std::log(e1 / e0);
  }
  throw insufficient_data_error("estimate_order: need 3 strictly decreasing errors above 100 eps");
}

}  // namespace rootkit
