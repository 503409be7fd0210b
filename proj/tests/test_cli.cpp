#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rootkit/rootkit.hpp"

namespace {

using json = nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run cli(const std::vector<std::string>& args) {
  std::string cmd = quote(ROOTKIT_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

Run cli_stderr(const std::vector<std::string>& args) {
  std::string cmd = quote(ROOTKIT_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>&1 >/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  return out;
}

// Validator for the subset of JSON Schema used by docs/output_schema.json:
// $ref (local), oneOf, type, enum, required, properties, additionalProperties, items.
class Schema {
 public:
  explicit Schema(json root) : root_(std::move(root)) {}

  bool validate(const json& v, std::string& why) const { return check(root_, v, "$", why); }

 private:
  json root_;

  const json& resolve(const json& s) const {
    if (!s.contains("$ref")) return s;
    std::string ref = s["$ref"].get<std::string>().substr(1);
    return root_.at(json::json_pointer(ref));
  }

  static bool has_type(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    return false;
  }

  bool check(const json& schema, const json& v, const std::string& at, std::string& why) const {
    const json& s = resolve(schema);
    if (s.contains("oneOf")) {
      int matches = 0;
      for (const auto& alt : s["oneOf"]) {
        std::string ignored;
        matches += check(alt, v, at, ignored);
      }
      if (matches != 1) return why = at + ": matches " + std::to_string(matches) + " alternatives", false;
    }
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_string()) {
        ok = has_type(v, s["type"]);
      } else {
        for (const auto& t : s["type"]) ok = ok || has_type(v, t);
      }
      if (!ok) return why = at + ": wrong type " + v.dump(), false;
    }
    if (s.contains("enum")) {
      bool ok = false;
      for (const auto& e : s["enum"]) ok = ok || e == v;
      if (!ok) return why = at + ": not in enum " + v.dump(), false;
    }
    if (v.is_object()) {
      for (const auto& k : s.value("required", json::array())) {
        if (!v.contains(k.get<std::string>())) return why = at + ": missing " + k.get<std::string>(), false;
      }
      const json props = s.value("properties", json::object());
      for (const auto& [k, item] : v.items()) {
        if (props.contains(k)) {
          if (!check(props[k], item, at + "." + k, why)) return false;
        } else if (s.value("additionalProperties", true) == false) {
          return why = at + ": unexpected " + k, false;
        }
      }
    }
    if (v.is_array() && s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!check(s["items"], v[i], at + "[" + std::to_string(i) + "]", why)) return false;
      }
    }
    return true;
  }
};

const Schema& schema() {
  static const Schema s = [] {
    std::ifstream in(ROOTKIT_SCHEMA);
    return Schema(json::parse(in));
  }();
  return s;
}

void expect_valid(const std::string& out) {
  const json doc = json::parse(out);
  std::string why;
  EXPECT_TRUE(schema().validate(doc, why)) << why;
}

TEST(CliSolve, NewtonOnSqrt612ConvergesWithSevenRowTrace) {
  const auto r = cli({"solve", "--problem", "sqrt612", "--x0", "10", "--method", "newton", "--format", "csv"});
  EXPECT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 8u);
  EXPECT_EQ(ls[0], "iter,x,f,fprime,fsecond,q,multiplier,step");
  EXPECT_EQ(fields(ls[1])[1], "10");
  EXPECT_EQ(fields(ls[7])[0], "6");
}

TEST(CliSolve, JsonReportValidatesAndMatchesCsv) {
  const auto r = cli({"solve", "--problem", "sqrt612", "--x0", "10", "--method", "newton"});
  EXPECT_EQ(r.code, 0);
  expect_valid(r.out);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["status"], "converged");
  EXPECT_EQ(doc["iterations"], 6);
  EXPECT_EQ(doc["trace"].size(), 7u);
  EXPECT_DOUBLE_EQ(doc["root"].get<double>(), 24.738633753705963);
  EXPECT_TRUE(doc["trace"].back()["step"].is_null());
}

TEST(CliSolve, TanhNewtonFromThresholdIsTwoCycle) {
  const auto r = cli({"solve", "--expr", "tanh(x)", "--x0", "1.0886594924826534", "--method", "newton"});
  EXPECT_EQ(r.code, 1);
  expect_valid(r.out);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["status"], "cycle");
  EXPECT_EQ(doc["period"], 2);
}

TEST(CliSolve, TanhNewtonFromOnePointFiveDoesNotConverge) {
  const auto r = cli({"solve", "--expr", "tanh(x)", "--x0", "1.5", "--method", "newton"});
  EXPECT_NE(r.code, 0);
  const json doc = json::parse(r.out);
  EXPECT_NE(doc["status"], "converged");
}

TEST(CliSolve, ParseErrorIsPositionedAndExitsTwo) {
  const auto r = cli_stderr({"solve", "--expr", "x^", "--x0", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("offset 2"), std::string::npos) << r.out;
  EXPECT_EQ(cli_stderr({"solve", "--expr", "x^^2", "--x0", "1"}).code, 2);
  EXPECT_EQ(cli_stderr({"solve", "--expr", "foo(x)", "--x0", "1"}).code, 2);
}

TEST(CliSolve, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({"solve", "--x0", "1"}).code, 2);
  EXPECT_EQ(cli({"solve", "--problem", "tanh", "--expr", "x", "--x0", "1"}).code, 2);
  EXPECT_EQ(cli({"solve", "--problem", "nope", "--x0", "1"}).code, 2);
  EXPECT_EQ(cli({"solve", "--problem", "tanh", "--x0", "1", "--method", "secant"}).code, 2);
  EXPECT_EQ(cli({"solve", "--problem", "tanh", "--x0", "1", "--max-iter", "0"}).code, 2);
  EXPECT_EQ(cli({"solve", "--expr", "log(x)", "--x0", "-1"}).code, 2);
}

TEST(CliSolve, Hnr1OverflowExitsThreeAndPrintsQ) {
  const auto r = cli({"solve", "--problem", "cubic_cycle", "--x0", "0.82", "--method", "hnr1"});
  EXPECT_EQ(r.code, 3);
  expect_valid(r.out);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["status"], "overflow");
  EXPECT_NE(doc["detail"].get<std::string>().find("q = "), std::string::npos) << doc["detail"];
}

TEST(CliSolve, TurningPointStatuses) {
  EXPECT_EQ(cli({"solve", "--problem", "cubic_cycle", "--x0", "-0.81649658092772603"}).code, 1);
  EXPECT_EQ(cli({"solve", "--problem", "cubic_cycle", "--x0", "0.81649658092772603"}).code, 3);
}

TEST(CliSweep, FractalNewtonSweepRootRuns) {
  const auto r = cli({"sweep", "--problem", "fractal_cubic", "--method", "newton", "--from", "2.3528363", "--to",
                      "2.35287527", "--points", "4700"});
  EXPECT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 4701u);
  EXPECT_EQ(ls[0], "x0,status,root,iterations,max_excursion");
  const auto p = rootkit::fractal_cubic();
  const auto grid = rootkit::linspace(2.3528363, 2.35287527, 4700);
  const auto rows = rootkit::sweep(p, rootkit::Method::newton, grid,
                                   rootkit::basin_config(rootkit::Method::newton));
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = fields(ls[i]);
    ASSERT_EQ(f.size(), 5u);
    const auto& row = rows[i - 1];
    EXPECT_EQ(std::stod(f[0]), row.x0);
    EXPECT_EQ(f[1], rootkit::to_string(row.status));
    if (row.root) {
      EXPECT_EQ(std::stod(f[2]), *row.root);
    }
    EXPECT_EQ(std::stoi(f[3]), row.iterations);
  }
  // Every point reaches one of the three roots; which one is fractal in x0.
  std::set<std::optional<std::size_t>> seen;
  for (const auto& row : rows) seen.insert(row.root_index);
  EXPECT_EQ(seen.size(), 3u);
  EXPECT_EQ(seen.count(std::nullopt), 0u);
}

TEST(CliSweep, TanhHnr2SweepConvergesAcrossRange) {
  const auto r = cli({"sweep", "--problem", "tanh", "--method", "hnr2", "--from", "0", "--to", "3", "--points", "31"});
  EXPECT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 32u);
  for (std::size_t i = 1; i < ls.size(); ++i) EXPECT_EQ(fields(ls[i])[1], "converged") << ls[i];
}

TEST(CliSweep, BadRangesExitTwo) {
  EXPECT_EQ(cli({"sweep", "--problem", "tanh", "--from", "1", "--to", "0", "--points", "5"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--problem", "tanh", "--from", "0", "--to", "1", "--points", "0"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--problem", "tanh", "--from", "0", "--to", "1", "--step", "-0.1"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--problem", "tanh", "--from", "0", "--to", "1"}).code, 2);
}

TEST(CliBoundary, TanhNewtonThreshold) {
  const auto r = cli({"boundary", "--problem", "tanh", "--method", "newton", "--lo", "0.5", "--hi", "2",
                      "--resolution", "1e-6"});
  EXPECT_EQ(r.code, 0);
  expect_valid(r.out);
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["boundary"].get<double>(), 1.088659, 1e-5);
}

TEST(CliBoundary, SameOutcomeAtBothEndsExitsOne) {
  EXPECT_EQ(cli({"boundary", "--problem", "tanh", "--method", "hnr2", "--lo", "1", "--hi", "4"}).code, 1);
}

TEST(CliReproduce, KnownAndUnknownExperiments) {
  const auto ok = cli({"reproduce", "sqrt612"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);

  const auto tanh = cli({"reproduce", "tanh-basin"});
  EXPECT_NE(tanh.out.find("1.08865"), std::string::npos) << tanh.out;
  EXPECT_EQ(tanh.code, tanh.out.find("FAIL") == std::string::npos ? 0 : 1);

  EXPECT_EQ(cli({"reproduce", "unknown-name"}).code, 2);
}

TEST(CliOutput, RepeatedRunsAreByteIdentical) {
  const std::vector<std::vector<std::string>> argvs{
      {"solve", "--problem", "cubic_cycle", "--x0", "0.125"},
      {"solve", "--problem", "cubic_cycle", "--x0", "0.125", "--format", "csv"},
      {"sweep", "--problem", "fractal_cubic", "--from", "-5", "--to", "5", "--points", "2001"},
      {"boundary", "--problem", "fractal_cubic", "--lo", "2", "--hi", "3", "--format", "csv"},
  };
  for (const auto& a : argvs) {
    const auto first = cli(a), second = cli(a);
    EXPECT_EQ(first.code, second.code);
    EXPECT_EQ(first.out, second.out);
    EXPECT_FALSE(first.out.empty());
  }
}

TEST(CliOutput, ThreadCapDoesNotChangeSweepOutput) {
  const std::vector<std::string> a{"sweep", "--problem", "fractal_cubic", "--from", "-5", "--to", "5", "--points", "999"};
  const auto many = cli(a);
  setenv("ROOTKIT_THREADS", "1", 1);
  const auto one = cli(a);
  unsetenv("ROOTKIT_THREADS");
  EXPECT_EQ(many.out, one.out);
}

TEST(CliOutput, CsvRealsRoundTrip) {
  const auto r = cli({"solve", "--problem", "sqrt612", "--x0", "10", "--method", "newton", "--format", "csv"});
  const auto ls = lines(r.out);
  ASSERT_GE(ls.size(), 2u);
  const double x = std::stod(fields(ls.back())[1]);
  EXPECT_EQ(x, 24.738633753705963);
}

TEST(CliProblems, ListsCatalog) {
  const auto r = cli({"problems"});
  EXPECT_EQ(r.code, 0);
  for (const char* n : {"sqrt612", "tanh", "cubic_cycle", "fractal_cubic", "log_family", "mobius", "affine"}) {
    EXPECT_NE(r.out.find(n), std::string::npos) << n;
  }
}

}  // namespace
