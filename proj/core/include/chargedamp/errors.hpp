#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chargedamp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A single invariant violated by a scenario.
struct Violation {
  enum class Kind { mass_non_positive, bad_window, bad_stride, bad_parameter };
  Kind kind;
  std::string message;
  double time = 0.0;  // only meaningful for mass_non_positive
};

/// Scenario rejected by validation; carries every violation found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }
  bool has(Violation::Kind kind) const noexcept;

 private:
  std::vector<Violation> violations_;
};

/// A closed-form quantity was evaluated outside its domain (m(t) <= 0, e^{2 beta} <= 0, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Numerical integration failed. `operation` names the failing sub-operation.
class SolverError : public Error {
 public:
  SolverError(std::string operation, const std::string& what, double time);
  const std::string& operation() const noexcept { return operation_; }
  double time() const noexcept { return time_; }

 private:
  std::string operation_;
  double time_;
};

/// The propagator is evaluated at a caustic (sin(delta) ~ 0).
class SingularTimeError : public Error {
 public:
  SingularTimeError(double time, double sin_delta);
  double time() const noexcept { return time_; }
  double sin_delta() const noexcept { return sin_delta_; }

 private:
  double time_;
  double sin_delta_;
};

/// An operation was asked of a model variant it does not apply to.
class WrongModelError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario text. `line` is 0 when the problem is with a value rather than syntax.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key, int line = 0);
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace chargedamp
