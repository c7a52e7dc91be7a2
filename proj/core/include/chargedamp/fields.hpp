#pragma once

// Homogeneous, time-dependent crossed fields in the symmetric gauge:
//   B = B0 f(t) z,  A = (B/2)(-y, x),  phi = -Ex(t) x - Ey(t) y,
// plus the isotropic confinement kappa(t) = kappa0 g(t) entering as kappa r^2 / 8.
//
// Because A depends on time, the physical in-plane field carries the induced
// term: E = (Ex + Bdot y / 2, Ey - Bdot x / 2).

#include <string_view>
#include <variant>

#include "chargedamp/mass_models.hpp"

namespace chargedamp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Analytic time profiles. Each has a closed-form derivative.

/// c
struct ConstantProfile {
  double value;
  friend bool operator==(const ConstantProfile&, const ConstantProfile&) = default;
};
/// scale * e^{t/tau}
struct ExponentialProfile {
  double scale;
  double tau;
  friend bool operator==(const ExponentialProfile&, const ExponentialProfile&) = default;
};
/// offset + amplitude * sin(angular_frequency t + phase)
struct SinusoidalProfile {
  double offset;
  double amplitude;
  double angular_frequency;
  double phase;
  friend bool operator==(const SinusoidalProfile&, const SinusoidalProfile&) = default;
};
/// offset + slope * t
struct LinearRampProfile {
  double offset;
  double slope;
  friend bool operator==(const LinearRampProfile&, const LinearRampProfile&) = default;
};

using Profile = std::variant<ConstantProfile, ExponentialProfile, SinusoidalProfile, LinearRampProfile>;

double value(const Profile& p, double t);
double rate(const Profile& p, double t);
std::string_view profile_name(const Profile& p);
bool is_constant(const Profile& p);

struct FieldConfig {
  double B0 = 0.0;                              ///< T
  Profile f = ConstantProfile{1.0};             ///< B = B0 f(t)
  Profile Ex = ConstantProfile{0.0};            ///< V/m
  Profile Ey = ConstantProfile{0.0};            ///< V/m
  double kappa0 = 0.0;                          ///< J/m^2
  Profile g = ConstantProfile{1.0};             ///< kappa = kappa0 g(t)

  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;
};

/// Raw field values at t; no mass or charge needed.
struct FieldValues {
  double B;
  double Bdot;
  double Ex;
  double Ey;
  double kappa;
};

FieldValues field_values(const FieldConfig& cfg, double t);

/// Field values plus the charge- and mass-dependent derived quantities.
struct FieldSample {
  double B;
  double Bdot;
  double Ex;
  double Ey;
  double kappa;
  double omega;      ///< q B / m(t)
  double beta;       ///< e^{2 beta} = f^2 + kappa0 e^alpha g / (m0 omega0^2)
  double beta_rate;
};

/// omega0 = q B0 / m0. Coincides with omega(t) at any time where f = 1 and m = m0.
double reference_cyclotron_frequency(const FieldConfig& cfg, const MassModel& mass, double q);

/// Throws DomainError (beta domain) when f^2 + kappa0 e^alpha g / (m0 omega0^2) <= 0.
FieldSample sample_fields(const FieldConfig& cfg, const MassModel& mass, double q, double t);

/// Symmetric-gauge vector potential (Ax, Ay) in T m.
Vec2 vector_potential(const FieldConfig& cfg, double t, double x, double y);

/// phi = -Ex x - Ey y, in V.
double scalar_potential(const FieldConfig& cfg, double t, double x, double y);

/// Full in-plane field -grad(phi) - dA/dt, including the induced Bdot term.
Vec2 electric_field(const FieldConfig& cfg, double t, double x, double y);

/// Components of (Ex, Ey) in a frame rotated by theta.
Vec2 rotated_field(double Ex, double Ey, double theta);

}  // namespace chargedamp
