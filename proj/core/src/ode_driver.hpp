#pragma once

// Grid-reporting ODE driver over boost::odeint.
//
// The state is integrated in scaled form z = x / scale so that the single
// (rel_tol, abs_tol) pair of IntegratorConfig applies uniformly to components
// with wildly different SI magnitudes (1e-6 m next to 1e-27 kg m/s). Time is
// integrated as tau = (t - t0) / span: odeint compares times against an absolute
// machine epsilon, which is meaningless for SI times of order 1e-12 s.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "chargedamp/errors.hpp"
#include "chargedamp/integrator.hpp"

namespace chargedamp::detail {

template <std::size_t N>
using State = std::array<double, N>;

/// Integrates dx/dt = rhs(x, t) from (x0, times.front()) and calls
/// observe(x, t) at every time in `times` (the first call is x0 itself).
/// Any integrator failure is rethrown as SolverError naming `operation`.
template <std::size_t N, class Rhs, class Observe>
void integrate_on_grid(Rhs&& rhs, const State<N>& x0, const State<N>& scale, const std::vector<double>& times,
                       const IntegratorConfig& cfg, const std::string& operation, Observe&& observe) {
  namespace odeint = boost::numeric::odeint;
  if (times.empty()) return;

  const double t0 = times.front();
  const double span = times.back() - t0;
  double last_t = t0;
  std::size_t next = 0;
  auto scaled_rhs = [&](const State<N>& z, State<N>& dz, double tau) {
    State<N> x;
    for (std::size_t i = 0; i < N; ++i) x[i] = z[i] * scale[i];
    State<N> dx{};
    rhs(x, dx, t0 + tau * span);
    for (std::size_t i = 0; i < N; ++i) dz[i] = dx[i] * span / scale[i];
  };
  auto scaled_observe = [&](const State<N>& z, double) {
    const double t = times[next++];
    State<N> x;
    for (std::size_t i = 0; i < N; ++i) {
      x[i] = z[i] * scale[i];
      if (!std::isfinite(x[i])) {
        throw SolverError(operation, fmt::format("state became non-finite at t = {:g} s", t), t);
      }
    }
    last_t = t;
    observe(x, t);
  };

  State<N> z;
  for (std::size_t i = 0; i < N; ++i) z[i] = x0[i] / scale[i];

  if (times.size() == 1) {
    scaled_observe(z, times.front());
    return;
  }

  std::vector<double> taus(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) taus[i] = (times[i] - t0) / span;
  taus.back() = 1.0;
  try {
    if (cfg.method == IntegratorConfig::Method::rk4_fixed) {
      const double h = (cfg.fixed_step > 0.0 ? cfg.fixed_step : cfg.max_step) / span;
      odeint::runge_kutta4<State<N>> stepper;
      odeint::integrate_times(stepper, scaled_rhs, z, taus.begin(), taus.end(), h, scaled_observe);
    } else {
      using Dopri = odeint::runge_kutta_dopri5<State<N>>;
      const double max_dt = cfg.max_step > 0.0 ? cfg.max_step / span : 1.0;
      auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, max_dt, Dopri());
      const double dt0 = std::min(max_dt, std::min(taus[1], 1e-3));
      odeint::integrate_times(stepper, scaled_rhs, z, taus.begin(), taus.end(), dt0, scaled_observe,
                              odeint::max_step_checker(5'000'000));
    }
  } catch (const SolverError&) {
    throw;
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception& e) {
    throw SolverError(operation, fmt::format("integration failed after t = {:g} s: {}", last_t, e.what()), last_t);
  }
}

}  // namespace chargedamp::detail
