#include "chargedamp/errors.hpp"

#include <algorithm>
#include <sstream>

namespace chargedamp {

namespace {

std::string join_violations(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << "invalid scenario:";
  for (const auto& v : violations) out << "\n  - " << v.message;
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

bool ValidationError::has(Violation::Kind kind) const noexcept {
  return std::any_of(violations_.begin(), violations_.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

SolverError::SolverError(std::string operation, const std::string& what, double time)
    : Error(operation + ": " + what), operation_(std::move(operation)), time_(time) {}

SingularTimeError::SingularTimeError(double time, double sin_delta)
    : Error("propagator is singular at t = " + std::to_string(time) +
            " (|sin delta| = " + std::to_string(sin_delta) + ")"),
      time_(time),
      sin_delta_(sin_delta) {}

ConfigError::ConfigError(const std::string& what, std::string key, int line)
    : Error(what), key_(std::move(key)), line_(line) {}

}  // namespace chargedamp
