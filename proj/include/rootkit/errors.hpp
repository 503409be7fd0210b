#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rootkit {

/// Base of every error thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function evaluation produced NaN or an infinity.
class non_finite_error : public error {
 public:
  using error::error;
};

/// The iteration step has no defined value (q = +inf, indeterminate q, f' = 0 for Newton).
class undefined_step_error : public error {
 public:
  using error::error;
};

/// Halley's multiplier 1/(1 - q/2) at its pole q = 2.
class pole_error : public undefined_step_error {
 public:
  using undefined_step_error::undefined_step_error;
};

/// exp(t) is not representable; carries the offending argument.
class overflow_error : public error {
 public:
  overflow_error(const std::string& what, double argument)
      : error(what), argument_(argument) {}
  double argument() const noexcept { return argument_; }

 private:
  double argument_;
};

/// Evaluation outside the real domain of a function (log of a non-positive
/// value, division by zero, ...).
class domain_error : public error {
 public:
  using error::error;
};

class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t offset)
      : error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class unknown_function_error : public parse_error {
 public:
  using parse_error::parse_error;
};

class config_error : public error {
 public:
  using error::error;
};

class insufficient_data_error : public error {
 public:
  using error::error;
};

/// find_boundary called with the same outcome at both ends of the bracket.
class bracket_error : public error {
 public:
  using error::error;
};

}  // namespace rootkit
