#include "chargedamp/classical_direct.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "ode_driver.hpp"

namespace chargedamp {

namespace {

using detail::State;

struct Forces {
  double ax;
  double ay;
};

// q(E + v x B) - kappa r / 4 - drag v, divided by the inertial mass.
Forces acceleration(const FieldConfig& fields, double q, double inertia, double drag, const State<4>& u, double t) {
  const FieldValues f = field_values(fields, t);
  const Vec2 E = electric_field(fields, t, u[0], u[1]);
  const double fx = q * (E.x + u[3] * f.B) - drag * u[2] - 0.25 * f.kappa * u[0];
  const double fy = q * (E.y - u[2] * f.B) - drag * u[3] - 0.25 * f.kappa * u[1];
  return {fx / inertia, fy / inertia};
}

Trajectory run(const Scenario& s, const TimeGrid& grid, const std::string& operation, auto&& mass_and_drag) {
  const CharacteristicScales sc = characteristic_scales(s);
  const State<4> scale{sc.length, sc.length, sc.speed, sc.speed};
  const State<4> x0{s.initial_position.x, s.initial_position.y, s.initial_velocity.x, s.initial_velocity.y};

  auto rhs = [&](const State<4>& u, State<4>& du, double t) {
    const auto [m, drag] = mass_and_drag(t);
    const Forces a = acceleration(s.fields, s.q, m, drag, u, t);
    du = {u[2], u[3], a.ax, a.ay};
  };

  Trajectory out;
  out.reserve(grid.size());
  detail::integrate_on_grid<4>(rhs, x0, scale, grid.samples(), s.integrator, operation,
                               [&](const State<4>& u, double t) { out.push_back({t, u[0], u[1], u[2], u[3]}); });
  return out;
}

}  // namespace

Trajectory integrate_newtonian(const ValidatedScenario& vs, const TimeGrid& grid) {
  const Scenario& s = *vs;
  const double m0 = reference_mass(s.mass_model);
  const double tau = decay_time(s.mass_model);
  const double drag = tau > 0.0 ? m0 / tau : 0.0;
  return run(s, grid, "integrate_newtonian", [m0, drag](double) { return std::pair{m0, drag}; });
}

Trajectory integrate_variable_mass(const ValidatedScenario& vs, const TimeGrid& grid) {
  const Scenario& s = *vs;
  return run(s, grid, "integrate_variable_mass",
             [&s](double t) { return std::pair{mass(s.mass_model, t), mass_rate(s.mass_model, t)}; });
}

Vec2 stationary_velocity_general(double mdot, double B, double Ex, double Ey, double q) {
  const double qB = q * B;
  const double den = mdot * mdot + qB * qB;
  if (den == 0.0) throw DomainError("stationary state undefined for mdot = 0 and qB = 0", 0.0);
  return {q * (mdot * Ex + qB * Ey) / den, q * (mdot * Ey - qB * Ex) / den};
}

Vec2 stationary_velocity_ltdmm(const Scenario& s) {
  const auto* lin = std::get_if<LinearMass>(&s.mass_model);
  if (lin == nullptr) {
    throw WrongModelError(fmt::format("stationary_velocity_ltdmm needs the linear mass law, got {}",
                                      model_name(s.mass_model)));
  }
  const FieldValues f = field_values(s.fields, s.t_start);
  const double w0t = s.q * f.B / lin->m0 * lin->tau;
  const double pre = s.q * lin->tau / lin->m0 / (1.0 + w0t * w0t);
  return {pre * (f.Ex + w0t * f.Ey), pre * (f.Ey - w0t * f.Ex)};
}

std::optional<double> settling_time(const Trajectory& traj, Vec2 terminal, double rel) {
  if (traj.empty()) return std::nullopt;
  const double bound = rel * std::hypot(terminal.x, terminal.y);
  for (std::size_t i = traj.size(); i-- > 0;) {
    const double dev = std::hypot(traj[i].vx - terminal.x, traj[i].vy - terminal.y);
    if (dev > bound) {
      if (i + 1 == traj.size()) return std::nullopt;
      return traj[i + 1].t;
    }
  }
  return traj.front().t;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,x,y,vx,vy\n";
  for (const auto& k : traj) out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", k.t, k.x, k.y, k.vx, k.vy);
}

}  // namespace chargedamp
