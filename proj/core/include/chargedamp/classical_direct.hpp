#pragma once

// Brute-force integrators for the two direct models:
//   Newtonian drag:  m0 r'' = q (E + r' x B) - (m0/tau) r' - kappa r / 4
//   variable mass:   m  r'' = q (E + r' x B) - mdot r'     - kappa r / 4
// E is the full in-plane field, induced term included.

#include <iosfwd>
#include <optional>
#include <vector>

#include "chargedamp/scenario.hpp"

namespace chargedamp {

struct KinematicState {
  double t;
  double x;
  double y;
  double vx;
  double vy;
};

using Trajectory = std::vector<KinematicState>;

/// Constant mass m0 of the model, drag m0/tau (no drag for the constant law).
Trajectory integrate_newtonian(const ValidatedScenario& s, const TimeGrid& grid);

Trajectory integrate_variable_mass(const ValidatedScenario& s, const TimeGrid& grid);

/// Drift velocity where acceleration vanishes. Throws DomainError if mdot = 0 and qB = 0.
Vec2 stationary_velocity_general(double mdot, double B, double Ex, double Ey, double q);

/// (q tau/m0)(Ex + w0 tau Ey, Ey - w0 tau Ex)/(1 + w0^2 tau^2), fields taken at t_start.
/// Throws WrongModelError unless the mass law is linear.
Vec2 stationary_velocity_ltdmm(const Scenario& s);

/// The first sample after the last one whose velocity lies farther than
/// rel * |terminal| from `terminal`. nullopt if the final sample is still outside.
std::optional<double> settling_time(const Trajectory& traj, Vec2 terminal, double rel = 0.01);

/// CSV with header t,x,y,vx,vy and 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace chargedamp
