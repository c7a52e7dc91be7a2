#include "chargedamp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <type_traits>

#include <fmt/format.h>

namespace chargedamp {

namespace {

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

bool profile_finite(const Profile& p) {
  return std::visit([](const auto& v) {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ConstantProfile>) return std::isfinite(v.value);
    else if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ExponentialProfile>)
      return std::isfinite(v.scale) && std::isfinite(v.tau) && v.tau != 0.0;
    else if constexpr (std::is_same_v<std::decay_t<decltype(v)>, SinusoidalProfile>)
      return finite_all({v.offset, v.amplitude, v.angular_frequency, v.phase});
    else return finite_all({v.offset, v.slope});
  }, p);
}

// First sampled time in [t0, t1] where the mass is not strictly positive, if any.
std::optional<double> first_non_positive_mass(const MassModel& model, double t0, double t1, double step) {
  // Cap the sample count; every shipped law is monotone so the endpoints carry the verdict anyway.
  constexpr double max_samples = 2e6;
  step = std::max(step, (t1 - t0) / max_samples);
  const auto n = static_cast<long long>(std::ceil((t1 - t0) / step));
  for (long long i = 0; i <= n; ++i) {
    const double t = i == n ? t1 : t0 + static_cast<double>(i) * step;
    try {
      const double m = mass(model, t);
      if (!(m > 0.0) || !std::isfinite(m)) return t;
    } catch (const DomainError&) {
      return t;
    }
  }
  return std::nullopt;
}

}  // namespace

ValidatedScenario validate_scenario(Scenario s) {
  std::vector<Violation> v;
  using K = Violation::Kind;

  const bool window_ok = std::isfinite(s.t_start) && std::isfinite(s.t_end) && s.t_end > s.t_start;
  if (!window_ok) {
    v.push_back({K::bad_window, fmt::format("t_end ({:g}) must exceed t_start ({:g})", s.t_end, s.t_start)});
  }
  const bool stride_ok = std::isfinite(s.output_stride) && s.output_stride > 0.0;
  if (!stride_ok) v.push_back({K::bad_stride, fmt::format("output_stride must be positive, got {:g}", s.output_stride)});

  for (auto& msg : parameter_problems(s.mass_model)) v.push_back({K::bad_parameter, std::move(msg)});
  if (!std::isfinite(s.q)) v.push_back({K::bad_parameter, "particle.charge must be finite"});
  if (!finite_all({s.initial_position.x, s.initial_position.y, s.initial_velocity.x, s.initial_velocity.y}))
    v.push_back({K::bad_parameter, "initial position and velocity must be finite"});
  const auto& f = s.fields;
  if (!std::isfinite(f.B0) || !std::isfinite(f.kappa0)) v.push_back({K::bad_parameter, "fields.B0 and fields.kappa0 must be finite"});
  for (const auto* p : {&f.f, &f.Ex, &f.Ey, &f.g}) {
    if (!profile_finite(*p)) {
      v.push_back({K::bad_parameter, fmt::format("fields: {} profile has non-finite or degenerate parameters", profile_name(*p))});
      break;
    }
  }
  if (!(s.packet_width > 0.0) || !std::isfinite(s.packet_width))
    v.push_back({K::bad_parameter, "packet.width must be positive"});
  const auto& ic = s.integrator;
  if (!(ic.rel_tol > 0.0) || !(ic.abs_tol > 0.0)) v.push_back({K::bad_parameter, "integration tolerances must be positive"});
  if (!(ic.max_step >= 0.0) || !(ic.fixed_step >= 0.0)) v.push_back({K::bad_parameter, "integration step sizes must be non-negative"});
  if (ic.method == IntegratorConfig::Method::rk4_fixed && ic.fixed_step <= 0.0 && ic.max_step <= 0.0)
    v.push_back({K::bad_parameter, "rk4 integration needs integration.fixed_step or integration.max_step"});

  const bool model_ok = parameter_problems(s.mass_model).empty();
  if (window_ok && stride_ok && model_ok) {
    if (auto t = first_non_positive_mass(s.mass_model, s.t_start, s.t_end, s.output_stride / 10.0)) {
      v.push_back({K::mass_non_positive, fmt::format("mass is non-positive at t = {:g} s", *t), *t});
    }
  }

  if (!v.empty()) throw ValidationError(std::move(v));
  return ValidatedScenario(std::move(s));
}

double collision_time_from_mobility(double mobility, double effective_mass_ratio, const PhysicalConstants& c) {
  std::vector<Violation> v;
  if (!(mobility > 0.0) || !std::isfinite(mobility))
    v.push_back({Violation::Kind::bad_parameter, "mobility must be positive"});
  if (!(effective_mass_ratio > 0.0) || !std::isfinite(effective_mass_ratio))
    v.push_back({Violation::Kind::bad_parameter, "effective mass ratio must be positive"});
  if (!v.empty()) throw ValidationError(std::move(v));
  return mobility * (effective_mass_ratio * c.electron_mass) / c.elementary_charge;
}

TimeGrid TimeGrid::uniform(double t_start, double t_end, double stride) {
  if (!(t_end > t_start) || !(stride > 0.0)) {
    throw ValidationError({{Violation::Kind::bad_window, "time grid needs t_end > t_start and stride > 0"}});
  }
  const double span = (t_end - t_start) / stride;
  auto n = static_cast<std::size_t>(std::floor(span));
  std::vector<double> s;
  s.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) s.push_back(t_start + static_cast<double>(i) * stride);
  // Close on t_end: replace a final sample that only misses it by rounding, else append.
  if (t_end - s.back() <= 1e-9 * stride) {
    if (s.size() > 1) s.back() = t_end;
    else s.push_back(t_end);
  } else {
    s.push_back(t_end);
  }
  return TimeGrid(std::move(s));
}

TimeGrid TimeGrid::from_samples(std::vector<double> samples) {
  if (samples.empty()) throw ValidationError({{Violation::Kind::bad_window, "time grid is empty"}});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i]) || (i > 0 && !(samples[i] > samples[i - 1]))) {
      throw ValidationError({{Violation::Kind::bad_window, "time samples must be finite and strictly increasing"}});
    }
  }
  return TimeGrid(std::move(samples));
}

CharacteristicScales characteristic_scales(const Scenario& s) {
  const double m0 = reference_mass(s.mass_model);
  const double omega0 = std::abs(s.q * s.fields.B0 / m0);
  double T = s.t_end - s.t_start;
  if (omega0 > 0.0) T = std::min(T, 1.0 / omega0);
  if (const double tau = decay_time(s.mass_model); tau > 0.0) T = std::min(T, tau);
  if (!(T > 0.0) || !std::isfinite(T)) T = 1.0;

  const FieldValues f0 = field_values(s.fields, s.t_start);
  const double e_mag = std::hypot(f0.Ex, f0.Ey);
  double V = std::hypot(s.initial_velocity.x, s.initial_velocity.y);
  V = std::max(V, std::abs(s.q) * e_mag * T / m0);
  if (omega0 > 0.0 && f0.B != 0.0) V = std::max(V, e_mag / std::abs(f0.B));
  if (!(V > 0.0) || !std::isfinite(V)) V = 1.0;

  const double L = std::max(V * T, std::hypot(s.initial_position.x, s.initial_position.y));
  return {T, V, L, m0 * V};
}

Vec2 initial_canonical_momentum(const Scenario& s) {
  const double m = mass(s.mass_model, s.t_start);
  const Vec2 A = vector_potential(s.fields, s.t_start, s.initial_position.x, s.initial_position.y);
  return {m * s.initial_velocity.x + s.q * A.x, m * s.initial_velocity.y + s.q * A.y};
}

Scenario gaas_scenario(double k) {
  Scenario s;
  s.q = -codata.elementary_charge;
  const double m0 = 0.067 * codata.electron_mass;
  s.mass_model = LinearMass{m0, 56e-12, k};
  s.fields.B0 = 0.04;
  s.fields.Ey = ConstantProfile{100.0};
  s.initial_velocity = {0.0, 3700.0};
  s.t_start = 0.0;
  s.t_end = 10e-9;
  s.output_stride = 1e-12;
  return s;
}

}  // namespace chargedamp
