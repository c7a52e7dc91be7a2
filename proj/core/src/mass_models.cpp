#include "chargedamp/mass_models.hpp"

#include <cmath>
#include <string>

namespace chargedamp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ln(1 + e^x) without overflow for large x.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// 1 / (1 + e^{-x})
double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double linear_factor(const LinearMass& m, double t) {
  const double u = t / m.tau + m.k;
  if (!(u > 0.0)) {
    throw DomainError("linear mass model is non-positive at t = " + std::to_string(t) +
                          " (requires t > -k tau)",
                      t);
  }
  return u;
}

}  // namespace

std::string_view model_name(const MassModel& model) {
  return std::visit(overloaded{
                        [](const ConstantMass&) { return std::string_view("constant"); },
                        [](const KanaiCaldirolaMass&) { return std::string_view("kanai_caldirola"); },
                        [](const LinearMass&) { return std::string_view("linear"); },
                        [](const LogInterpMass&) { return std::string_view("log_interp"); },
                    },
                    model);
}

double reference_mass(const MassModel& model) {
  return std::visit([](const auto& m) { return m.m0; }, model);
}

double decay_time(const MassModel& model) {
  return std::visit(overloaded{
                        [](const ConstantMass&) { return 0.0; },
                        [](const auto& m) { return m.tau; },
                    },
                    model);
}

std::vector<std::string> parameter_problems(const MassModel& model) {
  std::vector<std::string> problems;
  const double m0 = reference_mass(model);
  if (!(m0 > 0.0) || !std::isfinite(m0)) problems.push_back("mass_model.m0 must be positive");
  if (!std::holds_alternative<ConstantMass>(model)) {
    const double tau = decay_time(model);
    if (!(tau > 0.0) || !std::isfinite(tau)) problems.push_back("mass_model.tau must be positive");
  }
  if (const auto* lin = std::get_if<LinearMass>(&model)) {
    if (!(lin->k > 0.0) || !std::isfinite(lin->k)) problems.push_back("mass_model.k must be positive");
  }
  return problems;
}

double mass(const MassModel& model, double t) {
  return std::visit(overloaded{
                        [](const ConstantMass& m) { return m.m0; },
                        [t](const KanaiCaldirolaMass& m) { return m.m0 * std::exp(t / m.tau); },
                        [t](const LinearMass& m) { return m.m0 * linear_factor(m, t); },
                        [t](const LogInterpMass& m) { return m.m0 * softplus(t / m.tau); },
                    },
                    model);
}

double mass_rate(const MassModel& model, double t) {
  return std::visit(overloaded{
                        [](const ConstantMass&) { return 0.0; },
                        [t](const KanaiCaldirolaMass& m) { return m.m0 * std::exp(t / m.tau) / m.tau; },
                        [t](const LinearMass& m) {
                          linear_factor(m, t);
                          return m.m0 / m.tau;
                        },
                        [t](const LogInterpMass& m) { return m.m0 / m.tau * logistic(t / m.tau); },
                    },
                    model);
}

double alpha(const MassModel& model, double t) {
  return std::visit(overloaded{
                        [](const ConstantMass&) { return 0.0; },
                        [t](const KanaiCaldirolaMass& m) { return t / m.tau; },
                        [t](const LinearMass& m) { return std::log(linear_factor(m, t)); },
                        [t](const LogInterpMass& m) { return std::log(softplus(t / m.tau)); },
                    },
                    model);
}

double alpha_rate(const MassModel& model, double t) {
  return std::visit(overloaded{
                        [](const ConstantMass&) { return 0.0; },
                        [](const KanaiCaldirolaMass& m) { return 1.0 / m.tau; },
                        [t](const LinearMass& m) { return 1.0 / (m.tau * linear_factor(m, t)); },
                        [t](const LogInterpMass& m) {
                          const double x = t / m.tau;
                          return logistic(x) / (m.tau * softplus(x));
                        },
                    },
                    model);
}

InterpolationLimits asymptotic_interpolation_check(const LogInterpMass& model, double t) {
  return {model.m0 * std::exp(t / model.tau), model.m0 * t / model.tau};
}

}  // namespace chargedamp
