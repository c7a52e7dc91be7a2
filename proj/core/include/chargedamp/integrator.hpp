#pragma once

namespace chargedamp {

/// ODE integration controls shared by every solver.
///
/// Tolerances are applied to states scaled component-wise by the scenario's
/// characteristic length, speed, momentum and angle, so one pair of numbers is
/// meaningful for every component.
struct IntegratorConfig {
  enum class Method { rk4_fixed, rk45_adaptive };

  Method method = Method::rk45_adaptive;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.0;    ///< s; 0 means unbounded for rk45, required for rk4
  double fixed_step = 0.0;  ///< s; rk4 step, falls back to max_step

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

}  // namespace chargedamp
