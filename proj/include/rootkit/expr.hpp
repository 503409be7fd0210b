#pragma once

/**
 * @file expr.hpp
 * @brief Expressions in one variable, with second-order forward-mode
 *        differentiation.
 *
 * Grammar (whitespace is insignificant):
 *
 *   expr   := term (('+' | '-') term)*
 *   term   := factor (('*' | '/') factor)*
 *   factor := unary ('^' factor)?
 *   unary  := '-' unary | atom
 *   atom   := number | 'x' | 'pi' | 'e' | ident '(' expr ')' | '(' expr ')'
 *   ident  := log | exp | sin | cos | tanh | sqrt
 *
 * Exponents must not depend on x; they are folded to a constant at parse
 * time.
 *
 * @code
 * auto f = rootkit::parse("x^3 - 2*x + 2");
 * rootkit::Jet2 j = rootkit::eval_jet(f, 1.0);  // (1, 1, 6)
 * @endcode
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "rootkit/errors.hpp"
#include "rootkit/format.hpp"
#include "rootkit/jet.hpp"
#include "rootkit/problems.hpp"

namespace rootkit {

enum class Op { constant, variable, neg, log, exp, sin, cos, tanh, sqrt, add, sub, mul, div, pow };

inline bool is_unary(Op op) { return op >= Op::neg && op <= Op::sqrt; }
inline bool is_binary(Op op) { return op >= Op::add; }

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op = Op::constant;
  double constant = 0.0;  // Op::constant only
  ExprPtr lhs;            // operand of unary ops, left operand of binary ops
  ExprPtr rhs;            // right operand of binary ops
  int depth = 1;
  bool has_variable = false;
};

/// Immutable expression tree; cheap to copy and safe to share across threads.
class Expr {
 public:
  explicit Expr(ExprPtr root) : root_(std::move(root)) {}
  const ExprNode& root() const noexcept { return *root_; }
  const ExprPtr& ptr() const noexcept { return root_; }

 private:
  ExprPtr root_;
};

namespace expr_detail {

inline constexpr int max_depth = 512;

inline ExprPtr make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::constant;
  n->constant = v;
  return n;
}

inline ExprPtr make_variable() {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::variable;
  n->has_variable = true;
  return n;
}

inline ExprPtr make_node(Op op, ExprPtr lhs, ExprPtr rhs = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->depth = 1 + std::max(lhs->depth, rhs ? rhs->depth : 0);
  n->has_variable = lhs->has_variable || (rhs && rhs->has_variable);
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

inline const char* op_name(Op op) {
  switch (op) {
    case Op::constant: return "Const";
    case Op::variable: return "Var";
    case Op::neg: return "Neg";
    case Op::log: return "Log";
    case Op::exp: return "Exp";
    case Op::sin: return "Sin";
    case Op::cos: return "Cos";
    case Op::tanh: return "Tanh";
    case Op::sqrt: return "Sqrt";
    case Op::add: return "Add";
    case Op::sub: return "Sub";
    case Op::mul: return "Mul";
    case Op::div: return "Div";
    case Op::pow: return "Pow";
  }
  return "?";
}

inline void write(const ExprNode& n, std::string& out) {
  if (n.op == Op::constant) {
    out += format_shortest(n.constant);
    return;
  }
  out += op_name(n.op);
  if (n.op == Op::variable) return;
  out += '(';
  write(*n.lhs, out);
  if (n.rhs) {
    out += ',';
    write(*n.rhs, out);
  }
  out += ')';
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr parse_all() {
    ExprPtr e = expr();
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int nesting_ = 0;

  struct NestingGuard {
    Parser& p;
    explicit NestingGuard(Parser& parser) : p(parser) {
      if (++p.nesting_ > max_depth) p.fail("expression nested too deeply");
    }
    ~NestingGuard() { --p.nesting_; }
  };

  [[noreturn]] void fail(const std::string& what) const { throw parse_error(what, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr checked(ExprPtr n) {
    if (n->depth > max_depth) fail("expression nested too deeply");
    return n;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = checked(make_node(Op::add, lhs, term()));
      } else if (accept('-')) {
        lhs = checked(make_node(Op::sub, lhs, term()));
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = checked(make_node(Op::mul, lhs, factor()));
      } else if (accept('/')) {
        lhs = checked(make_node(Op::div, lhs, factor()));
      } else {
        return lhs;
      }
    }
  }

  ExprPtr factor() {
    NestingGuard guard(*this);
    ExprPtr base = unary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t exponent_at = pos_;
    ExprPtr exponent = factor();
    if (exponent->has_variable) {
      throw parse_error("exponent must not depend on x", exponent_at);
    }
    double k = 0.0;
    try {
      k = fold(*exponent);
    } catch (const error&) {
      throw parse_error("exponent is not a finite real number", exponent_at);
    }
    return checked(make_node(Op::pow, base, make_constant(k)));
  }

  ExprPtr unary() {
    NestingGuard guard(*this);
    if (accept('-')) return checked(make_node(Op::neg, unary()));
    return atom();
  }

  ExprPtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    std::size_t i = pos_;
    bool digits = false;
    while (i < src_.size() && is_digit(src_[i])) ++i, digits = true;
    if (i < src_.size() && src_[i] == '.') {
      ++i;
      while (i < src_.size() && is_digit(src_[i])) ++i, digits = true;
    }
    if (!digits) fail("malformed number");
    if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
      if (j < src_.size() && is_digit(src_[j])) {
        while (j < src_.size() && is_digit(src_[j])) ++j;
        i = j;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + i, v);
    if (res.ec != std::errc() || !std::isfinite(v)) fail("number out of range");
    pos_ = i;
    return make_constant(v);
  }

  ExprPtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (is_ident_start(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x") return make_variable();
    if (name == "pi") return make_constant(std::numbers::pi);
    if (name == "e") return make_constant(std::numbers::e);

    Op op{};
    if (name == "log") op = Op::log;
    else if (name == "exp") op = Op::exp;
    else if (name == "sin") op = Op::sin;
    else if (name == "cos") op = Op::cos;
    else if (name == "tanh") op = Op::tanh;
    else if (name == "sqrt") op = Op::sqrt;
    else throw unknown_function_error("unknown identifier '" + std::string(name) + "'", start);

    if (!accept('(')) fail("expected '(' after " + std::string(name));
    ExprPtr arg = expr();
    if (!accept(')')) fail("expected ')'");
    return checked(make_node(op, arg));
  }

  static double fold(const ExprNode& n);
};

inline std::string describe(const ExprNode& n) {
  std::string s;
  write(n, s);
  return s;
}

[[noreturn]] inline void domain_fail(const char* what, const ExprNode& n) {
  throw domain_error(std::string(what) + " in " + describe(n));
}

inline double eval_value(const ExprNode& n, double x) {
  switch (n.op) {
    case Op::constant: return n.constant;
    case Op::variable: return x;
    case Op::neg: return -eval_value(*n.lhs, x);
    case Op::log: {
      const double u = eval_value(*n.lhs, x);
      if (!(u > 0.0)) domain_fail("log of non-positive value", n);
      return std::log(u);
    }
    case Op::exp: return std::exp(eval_value(*n.lhs, x));
    case Op::sin: return std::sin(eval_value(*n.lhs, x));
    case Op::cos: return std::cos(eval_value(*n.lhs, x));
    case Op::tanh: return std::tanh(eval_value(*n.lhs, x));
    case Op::sqrt: {
      const double u = eval_value(*n.lhs, x);
      if (!(u > 0.0)) domain_fail("sqrt of non-positive value", n);
      return std::sqrt(u);
    }
    case Op::add: return eval_value(*n.lhs, x) + eval_value(*n.rhs, x);
    case Op::sub: return eval_value(*n.lhs, x) - eval_value(*n.rhs, x);
    case Op::mul: return eval_value(*n.lhs, x) * eval_value(*n.rhs, x);
    case Op::div: {
      const double num = eval_value(*n.lhs, x);
      const double den = eval_value(*n.rhs, x);
      if (den == 0.0) domain_fail("division by zero", n);
      return num / den;
    }
    case Op::pow: {
      const double u = eval_value(*n.lhs, x);
      const double k = n.rhs->constant;
      if (u < 0.0 && k != std::trunc(k)) domain_fail("non-integer power of negative value", n);
      if (u == 0.0 && k < 0.0) domain_fail("division by zero", n);
      return std::pow(u, k);
    }
  }
  return 0.0;
}

inline double Parser::fold(const ExprNode& n) {
  const double v = eval_value(n, 0.0);
  if (!std::isfinite(v)) throw non_finite_error("non-finite constant");
  return v;
}

// Truncated second-order Taylor coefficients; unchecked until the end.
struct Taylor2 {
  double v, d1, d2;
};

// h(u) with h' and h'' evaluated at u.
inline Taylor2 chain(double h, double h1, double h2, const Taylor2& u) {
  return {h, h1 * u.d1, h2 * u.d1 * u.d1 + h1 * u.d2};
}

inline Taylor2 eval_taylor(const ExprNode& n, double x) {
  Taylor2 r{};
  switch (n.op) {
    case Op::constant: r = {n.constant, 0.0, 0.0}; break;
    case Op::variable: r = {x, 1.0, 0.0}; break;
    case Op::neg: {
      const Taylor2 u = eval_taylor(*n.lhs, x);
      r = {-u.v, -u.d1, -u.d2};
      break;
    }
    case Op::log: {
      const Taylor2 u = eval_taylor(*n.lhs, x);
      if (!(u.v > 0.0)) domain_fail("log of non-positive value", n);
      r = chain(std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v), u);
      break;
    }
    case Op::exp: {
      const Taylor2 u = eval_taylor(*n.lhs, x);
      const double e = std::exp(u.v);
      r = chain(e, e, e, u);
      break;
    }
    case Op::sin: {
      const Taylor2 u = eval_taylor(*n.lhs, x);
      const double s = std::sin(u.v), c = std::cos(u.v);
      r = chain(s, c, -s, u);
      break;
    }
    case Op::cos: {
      const Taylor2 u = eval_taylor(*n.lhs, x);
      const double s = std::sin(u.v), c = std::cos(u.v);
      r = chain(c, -s, -c, u);
      break;
    }
    case Op::tanh: {
      const Taylor2 u = eval_taylor(*n.lhs, x);
      const double t = std::tanh(u.v);
      const double sech2 = 1.0 - t * t;
      r = chain(t, sech2, -2.0 * t * sech2, u);
      break;
    }
    case Op::sqrt: {
      const Taylor2 u = eval_taylor(*n.lhs, x);
      if (!(u.v > 0.0)) domain_fail("sqrt of non-positive value", n);
      const double s = std::sqrt(u.v);
      r = chain(s, 0.5 / s, -0.25 / (s * u.v), u);
      break;
    }
    case Op::add: {
      const Taylor2 a = eval_taylor(*n.lhs, x), b = eval_taylor(*n.rhs, x);
      r = {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
      break;
    }
    case Op::sub: {
      const Taylor2 a = eval_taylor(*n.lhs, x), b = eval_taylor(*n.rhs, x);
      r = {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
      break;
    }
    case Op::mul: {
      const Taylor2 a = eval_taylor(*n.lhs, x), b = eval_taylor(*n.rhs, x);
      r = {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
      break;
    }
    case Op::div: {
      const Taylor2 a = eval_taylor(*n.lhs, x), b = eval_taylor(*n.rhs, x);
      if (b.v == 0.0) domain_fail("division by zero", n);
      const double w = a.v / b.v;
      const double w1 = (a.d1 - w * b.d1) / b.v;
      const double w2 = (a.d2 - 2.0 * w1 * b.d1 - w * b.d2) / b.v;
      r = {w, w1, w2};
      break;
    }
    case Op::pow: {
      const Taylor2 u = eval_taylor(*n.lhs, x);
      const double k = n.rhs->constant;
      if (u.v < 0.0 && k != std::trunc(k)) domain_fail("non-integer power of negative value", n);
      if (u.v == 0.0 && k < 0.0) domain_fail("division by zero", n);
      if (k == 0.0) {
        r = {1.0, 0.0, 0.0};
      } else if (k == 1.0) {
        r = u;
      } else {
        const double h1 = k * std::pow(u.v, k - 1.0);
        const double h2 = k == 2.0 ? 2.0 : k * (k - 1.0) * std::pow(u.v, k - 2.0);
        r = chain(std::pow(u.v, k), h1, h2, u);
      }
      break;
    }
  }
  if (!std::isfinite(r.v) || !std::isfinite(r.d1) || !std::isfinite(r.d2)) {
    if (n.op == Op::pow || n.op == Op::sqrt) domain_fail("non-finite derivative", n);
    throw non_finite_error("non-finite value or derivative in " + describe(n));
  }
  return r;
}

}  // namespace expr_detail

/// Parses `text`; throws parse_error (with the offending offset) or
/// unknown_function_error.
inline Expr parse(std::string_view text) {
  return Expr(expr_detail::Parser(text).parse_all());
}

/// Structural form, e.g. "Sub(Pow(Var,2),612)".
inline std::string to_string(const Expr& e) { return expr_detail::describe(e.root()); }

inline double eval(const Expr& e, double x) { return expr_detail::eval_value(e.root(), x); }

/// f(x), f'(x), f''(x) by second-order forward-mode differentiation.
inline Jet2 eval_jet(const Expr& e, double x) {
  const auto t = expr_detail::eval_taylor(e.root(), x);
  return Jet2(t.v, t.d1, t.d2);
}

/// Wraps a parsed expression as a solvable problem on the whole real line.
/// Points where the expression is undefined surface as domain_error.
inline ProblemSpec expression_problem(std::string_view text) {
  Expr e = parse(text);
  return {"expr", std::string(text), [e](double x) { return eval_jet(e, x); },
          Interval::real_line(), {}, "user expression"};
}

}  // namespace rootkit
