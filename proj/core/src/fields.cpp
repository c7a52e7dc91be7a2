#include "chargedamp/fields.hpp"

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

}  // namespace

double value(const Profile& p, double t) {
  return std::visit(overloaded{
                        [](const ConstantProfile& c) { return c.value; },
                        [t](const ExponentialProfile& e) { return e.scale * std::exp(t / e.tau); },
                        [t](const SinusoidalProfile& s) {
                          return s.offset + s.amplitude * std::sin(s.angular_frequency * t + s.phase);
                        },
                        [t](const LinearRampProfile& r) { return r.offset + r.slope * t; },
                    },
                    p);
}

double rate(const Profile& p, double t) {
  return std::visit(overloaded{
                        [](const ConstantProfile&) { return 0.0; },
                        [t](const ExponentialProfile& e) { return e.scale * std::exp(t / e.tau) / e.tau; },
                        [t](const SinusoidalProfile& s) {
                          return s.amplitude * s.angular_frequency * std::cos(s.angular_frequency * t + s.phase);
                        },
                        [](const LinearRampProfile& r) { return r.slope; },
                    },
                    p);
}

std::string_view profile_name(const Profile& p) {
  return std::visit(overloaded{
                        [](const ConstantProfile&) { return std::string_view("constant"); },
                        [](const ExponentialProfile&) { return std::string_view("exponential"); },
                        [](const SinusoidalProfile&) { return std::string_view("sinusoidal"); },
                        [](const LinearRampProfile&) { return std::string_view("linear_ramp"); },
                    },
                    p);
}

bool is_constant(const Profile& p) {
  return std::visit(overloaded{
                        [](const ConstantProfile&) { return true; },
                        [](const SinusoidalProfile& s) { return s.amplitude == 0.0 || s.angular_frequency == 0.0; },
                        [](const LinearRampProfile& r) { return r.slope == 0.0; },
                        [](const ExponentialProfile& e) { return e.scale == 0.0; },
                    },
                    p);
}

FieldValues field_values(const FieldConfig& cfg, double t) {
  return {cfg.B0 * value(cfg.f, t), cfg.B0 * rate(cfg.f, t), value(cfg.Ex, t), value(cfg.Ey, t),
          cfg.kappa0 * value(cfg.g, t)};
}

double reference_cyclotron_frequency(const FieldConfig& cfg, const MassModel& mass, double q) {
  return q * cfg.B0 / reference_mass(mass);
}

FieldSample sample_fields(const FieldConfig& cfg, const MassModel& mass_model, double q, double t) {
  const FieldValues v = field_values(cfg, t);
  const double m = mass(mass_model, t);
  const double m0 = reference_mass(mass_model);
  const double omega0 = q * cfg.B0 / m0;

  const double f = value(cfg.f, t);
  const double fdot = rate(cfg.f, t);

  // e^{2 beta} = f^2 + c e^alpha g with c = kappa0 / (m0 omega0^2)
  double e2b = f * f;
  double e2b_rate = 2.0 * f * fdot;
  if (cfg.kappa0 != 0.0) {
    if (omega0 == 0.0) {
      throw DomainError("beta is undefined for kappa0 != 0 with vanishing reference cyclotron frequency", t);
    }
    const double c = cfg.kappa0 / (m0 * omega0 * omega0);
    const double ea = std::exp(alpha(mass_model, t));
    const double g = value(cfg.g, t);
    e2b += c * ea * g;
    e2b_rate += c * ea * (alpha_rate(mass_model, t) * g + rate(cfg.g, t));
  }
  if (!(e2b > 0.0) || !std::isfinite(e2b)) {
    throw DomainError("beta domain error: e^{2 beta} = " + std::to_string(e2b) + " at t = " + std::to_string(t), t);
  }

  FieldSample s{};
  s.B = v.B;
  s.Bdot = v.Bdot;
  s.Ex = v.Ex;
  s.Ey = v.Ey;
  s.kappa = v.kappa;
  s.omega = q * v.B / m;
  s.beta = 0.5 * std::log(e2b);
  s.beta_rate = 0.5 * e2b_rate / e2b;
  return s;
}

Vec2 vector_potential(const FieldConfig& cfg, double t, double x, double y) {
  const double B = cfg.B0 * value(cfg.f, t);
  return {-0.5 * B * y, 0.5 * B * x};
}

double scalar_potential(const FieldConfig& cfg, double t, double x, double y) {
  return -value(cfg.Ex, t) * x - value(cfg.Ey, t) * y;
}

Vec2 electric_field(const FieldConfig& cfg, double t, double x, double y) {
  const double Bdot = cfg.B0 * rate(cfg.f, t);
  return {value(cfg.Ex, t) + 0.5 * Bdot * y, value(cfg.Ey, t) - 0.5 * Bdot * x};
}

Vec2 rotated_field(double Ex, double Ey, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {Ex * c + Ey * s, -Ex * s + Ey * c};
}

}  // namespace chargedamp
