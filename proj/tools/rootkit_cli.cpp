// rootkit command-line front end.
//
//   rootkit solve     --problem NAME | --expr TEXT  --x0 X [--method M] [--format json|csv]
//   rootkit sweep     --problem NAME | --expr TEXT  --from A --to B (--points N | --step H)
//   rootkit boundary  --problem NAME | --expr TEXT  --lo A --hi B [--resolution R]
//   rootkit reproduce sqrt612 | tanh-basin | cubic-turning | fractal-scan
//   rootkit problems
//
// Exit codes: 0 success / converged, 1 no convergence or failed check,
// 2 usage or parse error, 3 numerical failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rootkit/rootkit.hpp"
#include "rootkit/experiments.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace rootkit;

constexpr int kSchemaVersion = 1;

enum Exit { ok = 0, not_converged = 1, usage = 2, numerical = 3 };

struct ProblemArgs {
  std::string problem;
  std::string expr;
  std::vector<double> params;
  std::string method = "hnr2";
};

struct ConfigArgs {
  std::optional<double> f_tol;
  std::optional<double> x_tol;
  std::optional<int> max_iter;
  std::optional<int> cycle_window;
  std::optional<double> divergence_bound;

  SolverConfig apply(SolverConfig cfg) const {
    if (f_tol) cfg.f_tol = *f_tol;
    if (x_tol) cfg.x_tol = *x_tol;
    if (max_iter) cfg.max_iter = *max_iter;
    if (cycle_window) cfg.cycle_detection_window = *cycle_window;
    if (divergence_bound) cfg.divergence_bound = *divergence_bound;
    return cfg;
  }
};

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& a) {
  auto* p = cmd->add_option("--problem", a.problem, "built-in problem name (see `rootkit problems`)");
  auto* e = cmd->add_option("--expr", a.expr, "expression in x, e.g. \"x^3 - 2*x + 2\"");
  p->excludes(e);
  cmd->add_option("--params", a.params, "parameters of log_family / mobius / affine")->delimiter(',');
  cmd->add_option("--method", a.method, "newton | halley | hnr1 | hnr2")->capture_default_str();
}

void add_config_options(CLI::App* cmd, ConfigArgs& c) {
  cmd->add_option("--f-tol", c.f_tol, "|f| convergence threshold");
  cmd->add_option("--x-tol", c.x_tol, "relative step threshold");
  cmd->add_option("--max-iter", c.max_iter, "iteration cap");
  cmd->add_option("--cycle-window", c.cycle_window, "longest cycle period probed (0-8)");
  cmd->add_option("--divergence-bound", c.divergence_bound, "|x| beyond which the run diverged");
}

ProblemSpec resolve_problem(const ProblemArgs& a) {
  if (a.problem.empty() == a.expr.empty()) throw usage_error("exactly one of --problem or --expr is required");
  if (!a.expr.empty()) return expression_problem(a.expr);
  auto p = make_problem(a.problem, a.params);
  if (!p) throw usage_error("unknown problem '" + a.problem + "'");
  return *p;
}

Method resolve_method(const std::string& name) {
  auto m = parse_method(name);
  if (!m) throw usage_error("unknown method '" + name + "'");
  return *m;
}

unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ROOTKIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

json real(double v) { return std::isfinite(v) ? json(v) : json(format_sig17(v)); }

json curvature_json(const Curvature& q) {
  return q.is_finite() ? json(q.value()) : json(to_string(q));
}

json optional_real(const std::optional<double>& v) { return v ? real(*v) : json(nullptr); }

json status_json(const Status& s) {
  json j = json::object();
  j["status"] = s.kind == Status::Kind::cycle ? std::string("cycle") : to_string(s);
  j["period"] = s.kind == Status::Kind::cycle ? json(s.period) : json(nullptr);
  return j;
}

int exit_for(const Status& s) {
  switch (s.kind) {
    case Status::Kind::converged: return ok;
    case Status::Kind::max_iterations:
    case Status::Kind::cycle:
    case Status::Kind::diverged:
    case Status::Kind::stationary: return not_converged;
    case Status::Kind::undefined_step:
    case Status::Kind::overflow:
    case Status::Kind::domain_exit:
    case Status::Kind::non_finite: return numerical;
  }
  return numerical;
}

json report_json(const ProblemSpec& p, Method m, double x0, const SolveReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "solve_report";
  j["problem"] = p.name;
  j["formula"] = p.formula;
  j["method"] = std::string(to_string(m));
  j["x0"] = x0;
  j.update(status_json(r.status));
  j["root"] = optional_real(r.root);
  j["iterations"] = r.iterations;
  j["max_excursion"] = real(r.max_excursion);
  j["f_tol"] = r.f_tol;
  j["detail"] = r.detail;
  json trace = json::array();
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& t = r.trace[i];
    json row;
    row["iter"] = i;
    row["x"] = t.x;
    row["f"] = t.jet.value();
    row["fprime"] = t.jet.d1();
    row["fsecond"] = t.jet.d2();
    row["q"] = curvature_json(curvature_q(t.jet));
    if (t.step) {
      row["multiplier"] = real(t.step->multiplier);
      row["newton_step"] = real(t.step->newton_step);
      row["step"] = real(t.step->applied_step);
      row["direction_reversed"] = t.step->direction_reversed;
      row["stationary"] = t.step->stationary;
    } else {
      row["multiplier"] = nullptr;
      row["newton_step"] = nullptr;
      row["step"] = nullptr;
      row["direction_reversed"] = nullptr;
      row["stationary"] = nullptr;
    }
    trace.push_back(std::move(row));
  }
  j["trace"] = std::move(trace);
  return j;
}

void write_trace_csv(std::ostream& os, const SolveReport& r) {
  os << "iter,x,f,fprime,fsecond,q,multiplier,step\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& t = r.trace[i];
    const auto q = curvature_q(t.jet);
    os << i << ',' << format_sig17(t.x) << ',' << format_sig17(t.jet.value()) << ','
       << format_sig17(t.jet.d1()) << ',' << format_sig17(t.jet.d2()) << ','
       << (q.is_finite() ? format_sig17(q.value()) : to_string(q)) << ',';
    if (t.step) os << format_sig17(t.step->multiplier) << ',' << format_sig17(t.step->applied_step);
    else os << ',';
    os << '\n';
  }
}

int cmd_solve(const ProblemArgs& pa, const ConfigArgs& ca, double x0, const std::string& format) {
  if (format != "json" && format != "csv") throw usage_error("--format must be json or csv");
  const ProblemSpec p = resolve_problem(pa);
  const Method m = resolve_method(pa.method);
  SolverConfig cfg = ca.apply({});
  cfg.method = m;
  const SolveReport r = solve(p, x0, cfg);
  if (format == "csv") {
    write_trace_csv(std::cout, r);
  } else {
    std::cout << report_json(p, m, x0, r).dump(2) << '\n';
  }
  if (!r.status.converged()) std::cerr << "rootkit: " << to_string(r.status) << (r.detail.empty() ? "" : ": ") << r.detail << '\n';
  return exit_for(r.status);
}

int cmd_sweep(const ProblemArgs& pa, const ConfigArgs& ca, double from, double to,
              std::optional<std::size_t> points, std::optional<double> step_size) {
  if (!(from < to)) throw usage_error("--from must be less than --to");
  if (points.has_value() == step_size.has_value()) throw usage_error("exactly one of --points or --step is required");
  if (points && *points < 2) throw usage_error("--points must be >= 2");
  if (step_size && !(*step_size > 0.0)) throw usage_error("--step must be > 0");
  const ProblemSpec p = resolve_problem(pa);
  const Method m = resolve_method(pa.method);
  const auto grid = points ? linspace(from, to, *points) : arange(from, to, *step_size);
  const auto rows = sweep(p, m, grid, ca.apply(basin_config(m)), sweep_threads());

  std::cout << "x0,status,root,iterations,max_excursion\n";
  for (const auto& r : rows) {
    std::cout << format_sig17(r.x0) << ',' << to_string(r.status) << ','
              << (r.root ? format_sig17(*r.root) : "") << ',' << r.iterations << ','
              << format_sig17(r.max_excursion) << '\n';
  }
  return ok;
}

int cmd_boundary(const ProblemArgs& pa, const ConfigArgs& ca, double lo, double hi, double resolution,
                 const std::string& format) {
  if (format != "json" && format != "csv") throw usage_error("--format must be json or csv");
  if (!(lo < hi)) throw usage_error("--lo must be less than --hi");
  if (!(resolution > 0.0)) throw usage_error("--resolution must be > 0");
  const ProblemSpec p = resolve_problem(pa);
  const Method m = resolve_method(pa.method);
  BasinBoundary b;
  try {
    b = find_boundary(p, m, lo, hi, resolution, ca.apply(basin_config(m)));
  } catch (const bracket_error& e) {
    std::cerr << "rootkit: " << e.what() << '\n';
    return not_converged;
  }
  auto outcome_json = [&](const Outcome& o) { return o ? json(p.known_roots[*o]) : json(nullptr); };
  if (format == "csv") {
    std::cout << "lo,hi,lo_root,hi_root\n"
              << format_sig17(b.lo) << ',' << format_sig17(b.hi) << ','
              << (b.lo_outcome ? format_sig17(p.known_roots[*b.lo_outcome]) : "") << ','
              << (b.hi_outcome ? format_sig17(p.known_roots[*b.hi_outcome]) : "") << '\n';
    return ok;
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "basin_boundary";
  j["problem"] = p.name;
  j["method"] = std::string(to_string(m));
  j["lo"] = b.lo;
  j["hi"] = b.hi;
  j["boundary"] = 0.5 * (b.lo + b.hi);
  j["lo_root"] = outcome_json(b.lo_outcome);
  j["hi_root"] = outcome_json(b.hi_outcome);
  j["predicate"] = b.predicate;
  std::cout << j.dump(2) << '\n';
  return ok;
}

int cmd_reproduce(const std::string& name) {
  const auto checks = experiments::run(name, sweep_threads());
  if (!checks) throw usage_error("unknown experiment '" + name + "'");
  bool all = true;
  for (const auto& c : *checks) {
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << c.measured << "]\n";
    all = all && c.pass;
  }
  return all ? ok : not_converged;
}

int cmd_problems() {
  for (const auto& p : catalog()) {
    std::cout << p.name << "  " << p.formula << "  roots:";
    for (double r : p.known_roots) std::cout << ' ' << format_shortest(r);
    std::cout << '\n';
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rootkit: Newton, Halley and curvature-corrected root finding"};
  app.require_subcommand(1);

  ProblemArgs pa;
  ConfigArgs ca;
  double x0 = 0.0, from = 0.0, to = 0.0, lo = 0.0, hi = 0.0, resolution = 1e-6;
  std::optional<std::size_t> points;
  std::optional<double> step_size;
  std::string format = "json", experiment;

  auto* solve_cmd = app.add_subcommand("solve", "solve f(x) = 0 from one starting point");
  add_problem_options(solve_cmd, pa);
  add_config_options(solve_cmd, ca);
  solve_cmd->add_option("--x0", x0, "starting point")->required();
  solve_cmd->add_option("--format", format, "json | csv (trace table)")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "solve from every point of a grid; CSV rows");
  add_problem_options(sweep_cmd, pa);
  add_config_options(sweep_cmd, ca);
  sweep_cmd->add_option("--from", from, "first x0")->required();
  sweep_cmd->add_option("--to", to, "last x0")->required();
  sweep_cmd->add_option("--points", points, "number of grid points");
  sweep_cmd->add_option("--step", step_size, "grid spacing");

  auto* boundary_cmd = app.add_subcommand("boundary", "bisect the basin boundary inside [lo, hi]");
  add_problem_options(boundary_cmd, pa);
  add_config_options(boundary_cmd, ca);
  boundary_cmd->add_option("--lo", lo, "left end")->required();
  boundary_cmd->add_option("--hi", hi, "right end")->required();
  boundary_cmd->add_option("--resolution", resolution, "bracket width")->capture_default_str();
  boundary_cmd->add_option("--format", format, "json | csv")->capture_default_str();

  auto* reproduce_cmd = app.add_subcommand("reproduce", "run a worked example and check it");
  reproduce_cmd->add_option("experiment", experiment, "sqrt612 | tanh-basin | cubic-turning | fractal-scan")
      ->required();

  auto* problems_cmd = app.add_subcommand("problems", "list the built-in problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*solve_cmd) return cmd_solve(pa, ca, x0, format);
    if (*sweep_cmd) return cmd_sweep(pa, ca, from, to, points, step_size);
    if (*boundary_cmd) return cmd_boundary(pa, ca, lo, hi, resolution, format);
    if (*reproduce_cmd) return cmd_reproduce(experiment);
    if (*problems_cmd) return cmd_problems();
  } catch (const usage_error& e) {
    std::cerr << "rootkit: " << e.what() << '\n';
    return usage;
  } catch (const parse_error& e) {
    std::cerr << "rootkit: parse error: " << e.what() << '\n';
    return usage;
  } catch (const config_error& e) {
    std::cerr << "rootkit: " << e.what() << '\n';
    return usage;
  } catch (const rootkit::domain_error& e) {
    std::cerr << "rootkit: " << e.what() << '\n';
    return usage;
  } catch (const overflow_error& e) {
    std::cerr << "rootkit: " << e.what() << " (q = " << format_sig17(e.argument()) << ")\n";
    return numerical;
  } catch (const rootkit::error& e) {
    std::cerr << "rootkit: " << e.what() << '\n';
    return numerical;
  }
  return usage;
}
