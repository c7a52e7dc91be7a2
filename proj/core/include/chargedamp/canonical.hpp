#pragma once

// Exact solution of the variable-mass crossed-field problem by a chain of
// time-dependent canonical transformations: a rotation by theta, a phase-space
// translation (lambda, pi) with action S, and a dilatation plus two shears
// (delta, eta, gamma). Composing them gives the affine symplectic propagator
// xi(t) = M xi0 + mu with xi = (x, y, px, py).
//
// Requirements: omega0 = q B0 / m0 != 0. The shear parametrization covers
// exactly the scenarios where e^{2 beta} = f^2 + kappa0 e^alpha g / (m0 omega0^2)
// is time independent (constant B with kappa0 = 0 and any mass law, or any
// combination keeping beta fixed). Elsewhere eta diverges where |delta| first
// reaches pi/2 and the solver reports a SolverError.

#include <Eigen/Core>
#include <Eigen/LU>
#include <iosfwd>
#include <vector>

#include "chargedamp/classical_direct.hpp"
#include "chargedamp/scenario.hpp"

namespace chargedamp {

struct TranslationParams {
  double theta = 0.0;
  double lambda_x = 0.0;
  double lambda_y = 0.0;
  double pi_x = 0.0;
  double pi_y = 0.0;
  double S = 0.0;
};

struct ShearParams {
  double delta = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
  double Delta = 0.0;  ///< (m0 omega0 / 2) e^{beta + eta}; carries the sign of omega0
  double beta = 0.0;
};

/// Time derivatives of the angle-like parameters, evaluated from the ODE right-hand side.
struct ParameterRates {
  double theta = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
};

struct ParameterSample {
  double t = 0.0;
  TranslationParams trans;
  ShearParams shear;
  ParameterRates rates;
};

using ParameterSeries = std::vector<ParameterSample>;

/// Integrates theta, the translations, the action and the shears on one shared
/// adaptive controller. Throws ValidationError if omega0 = 0.
ParameterSeries solve_parameters(const ValidatedScenario& s, const TimeGrid& grid);

// Views onto solve_parameters for callers interested in one family.
std::vector<double> integrate_theta(const ValidatedScenario& s, const TimeGrid& grid);
std::vector<TranslationParams> integrate_translations(const ValidatedScenario& s, const TimeGrid& grid);
std::vector<ShearParams> integrate_shear(const ValidatedScenario& s, const TimeGrid& grid);

struct HyperbolaResidual {
  std::vector<double> t;
  std::vector<double> residual;  ///< delta'^2/a^2 - (gamma' - beta' - eta')^2/b^2 - 1
  std::size_t skipped = 0;       ///< samples with sin(2 delta) ~ 0
};

HyperbolaResidual hyperbola_residual(const ParameterSeries& series, const Scenario& s);

struct SymplecticMap {
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
  Eigen::Vector4d mu = Eigen::Vector4d::Zero();
  double t = 0.0;
};

SymplecticMap assemble_map(const TranslationParams& trans, const ShearParams& shear, double t = 0.0);

using PhaseState = Eigen::Vector4d;

PhaseState propagate(const SymplecticMap& map, const PhaseState& xi0);

/// The constant-field, E = 0, kappa0 = 0 propagator written directly in terms of omega0 t.
SymplecticMap closed_form_constant_field(double t, double m0, double omega0);

/// max |Mb^T J Mb - J| where Mb is M in balanced units (x c, p / c with c^2 the
/// ratio of momentum-row to position-row block norms). The SI form would mix
/// entries of size 1e-21 and 1e21.
double symplectic_defect(const SymplecticMap& map);

/// det M computed in the same balanced units.
double balanced_determinant(const SymplecticMap& map);

/// (x0, y0, px0, py0) with p0 = m(t0) v0 + q A(r0).
PhaseState initial_phase_state(const Scenario& s);

/// Trajectory with velocities v = (p - q A) / m(t) from the propagated phase state.
Trajectory classical_trajectory_canonical(const ValidatedScenario& s, const TimeGrid& grid);

/// Header t,theta,lambda_x,lambda_y,pi_x,pi_y,S,beta,eta,delta,gamma,Delta.
void write_parameter_csv(std::ostream& out, const ParameterSeries& series);

/// Header t, M00..M33 (row-major), mu0..mu3.
void write_map_csv(std::ostream& out, const ParameterSeries& series);

}  // namespace chargedamp
