#include "chargedamp/canonical.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "ode_driver.hpp"

namespace chargedamp {

namespace {

using detail::State;

// State layout of the combined parameter system.
enum : std::size_t { kTheta, kLx, kLy, kPx, kPy, kS, kDelta, kEta, kGamma, kN };

constexpr double kEtaLimit = 40.0;

double reference_omega(const Scenario& s) {
  const double w0 = reference_cyclotron_frequency(s.fields, s.mass_model, s.q);
  if (w0 == 0.0 || !std::isfinite(w0)) {
    throw ValidationError({{Violation::Kind::bad_parameter,
                            "canonical solver needs a non-zero reference cyclotron frequency (q != 0 and B0 != 0)"}});
  }
  return w0;
}

struct ShearRates {
  double delta;
  double eta;
  double gamma;
};

ShearRates shear_rates(double a, double beta_rate, double delta, double eta) {
  const double sh = std::sinh(eta);
  if (sh == 0.0) return {a, -beta_rate, 0.0};
  const double s2 = std::sin(2.0 * delta);
  const double c2 = std::cos(2.0 * delta);
  return {a * std::cosh(eta), -beta_rate - 2.0 * a * sh * c2 / s2, 2.0 * a * sh * std::tan(delta)};
}

class ParameterSystem {
 public:
  ParameterSystem(const Scenario& s, double omega0) : s_(s), omega0_(omega0) {}

  void operator()(const State<kN>& u, State<kN>& du, double t) const {
    const FieldSample f = sample_fields(s_.fields, s_.mass_model, s_.q, t);
    const double m = mass(s_.mass_model, t);
    const Vec2 ER = rotated_field(f.Ex, f.Ey, u[kTheta]);
    const double K4 = 0.25 * (m * f.omega * f.omega + f.kappa);

    du[kTheta] = -0.5 * f.omega;
    du[kLx] = -u[kPx] / m;
    du[kLy] = -u[kPy] / m;
    du[kPx] = K4 * u[kLx] - s_.q * ER.x;
    du[kPy] = K4 * u[kLy] - s_.q * ER.y;
    du[kS] = (u[kPx] * u[kPx] + u[kPy] * u[kPy]) / (2.0 * m) +
             0.5 * K4 * (u[kLx] * u[kLx] + u[kLy] * u[kLy]) - s_.q * (ER.x * u[kLx] + ER.y * u[kLy]) +
             du[kLx] * u[kPx] + du[kLy] * u[kPy];

    if (!(std::abs(u[kEta]) <= kEtaLimit)) {
      throw SolverError("solve_parameters",
                        fmt::format("shear parametrization singular near t = {:g} s (eta = {:g})", t, u[kEta]), t);
    }
    const ShearRates r = shear_rates(a(f.beta, t), f.beta_rate, u[kDelta], u[kEta]);
    du[kDelta] = r.delta;
    du[kEta] = r.eta;
    du[kGamma] = r.gamma;
  }

  double a(double beta, double t) const { return 0.5 * omega0_ * std::exp(beta - alpha(s_.mass_model, t)); }

  ParameterSample sample(const State<kN>& u, double t) const {
    State<kN> du{};
    (*this)(u, du, t);
    const FieldSample f = sample_fields(s_.fields, s_.mass_model, s_.q, t);
    const double m0 = reference_mass(s_.mass_model);
    ParameterSample p;
    p.t = t;
    p.trans = {u[kTheta], u[kLx], u[kLy], u[kPx], u[kPy], u[kS]};
    p.shear = {u[kDelta], u[kEta], u[kGamma], 0.5 * m0 * omega0_ * std::exp(f.beta + u[kEta]), f.beta};
    p.rates = {du[kTheta], du[kDelta], du[kEta], du[kGamma], f.beta_rate};
    return p;
  }

 private:
  const Scenario& s_;
  double omega0_;
};

State<kN> rk4_step(const ParameterSystem& sys, const State<kN>& u, double t, double h) {
  State<kN> k1{}, k2{}, k3{}, k4{}, tmp{};
  sys(u, k1, t);
  for (std::size_t i = 0; i < kN; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
  sys(tmp, k2, t + 0.5 * h);
  for (std::size_t i = 0; i < kN; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
  sys(tmp, k3, t + 0.5 * h);
  for (std::size_t i = 0; i < kN; ++i) tmp[i] = u[i] + h * k3[i];
  sys(tmp, k4, t + h);
  State<kN> out{};
  for (std::size_t i = 0; i < kN; ++i) out[i] = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
  J.block<2, 2>(2, 0) = -Eigen::Matrix2d::Identity();
  return J;
}

Eigen::Matrix4d balanced(const Eigen::Matrix4d& M) {
  const double nxp = M.block<2, 2>(0, 2).cwiseAbs().maxCoeff();
  const double npx = M.block<2, 2>(2, 0).cwiseAbs().maxCoeff();
  const double c2 = (nxp > 0.0 && npx > 0.0) ? std::sqrt(npx / nxp) : 1.0;
  Eigen::Matrix4d B = M;
  B.block<2, 2>(0, 2) *= c2;
  B.block<2, 2>(2, 0) /= c2;
  return B;
}

}  // namespace

ParameterSeries solve_parameters(const ValidatedScenario& vs, const TimeGrid& grid) {
  const Scenario& s = *vs;
  const double omega0 = reference_omega(s);
  const ParameterSystem sys(s, omega0);
  const CharacteristicScales sc = characteristic_scales(s);
  const State<kN> scale{1.0, sc.length, sc.length, sc.momentum, sc.momentum, sc.momentum * sc.length, 1.0, 1.0, 1.0};

  const std::vector<double>& times = grid.samples();
  const double t0 = times.front();
  ParameterSeries out;
  out.reserve(times.size());

  State<kN> u0{};
  ParameterSample first = sys.sample(u0, t0);
  first.rates.eta = -0.5 * first.rates.beta;
  out.push_back(first);
  if (times.size() == 1) return out;

  const FieldSample f0 = sample_fields(s.fields, s.mass_model, s.q, t0);
  if (f0.beta_rate == 0.0) {
    detail::integrate_on_grid<kN>(sys, u0, scale, times, s.integrator, "solve_parameters",
                                  [&](const State<kN>& u, double t) {
                                    if (t != t0) out.push_back(sys.sample(u, t));
                                  });
    return out;
  }

  // delta = eta = 0 at t0 is a removable singularity of the shear equations when
  // beta moves: step off it with the leading-order series and integrate from there.
  const double a0 = sys.a(f0.beta, t0);
  const double a0_rate = a0 * (f0.beta_rate - alpha_rate(s.mass_model, t0));
  const double h0 = std::min(1e-6 / std::abs(a0), 0.5 * (times[1] - times[0]));
  State<kN> u1 = rk4_step(sys, u0, t0, h0);
  u1[kDelta] = a0 * h0 + 0.5 * a0_rate * h0 * h0;
  u1[kEta] = -0.5 * f0.beta_rate * h0;
  u1[kGamma] = 0.0;

  std::vector<double> rest;
  rest.reserve(times.size());
  rest.push_back(t0 + h0);
  rest.insert(rest.end(), times.begin() + 1, times.end());
  bool launched = false;
  detail::integrate_on_grid<kN>(sys, u1, scale, rest, s.integrator, "solve_parameters",
                                [&](const State<kN>& u, double t) {
                                  if (launched) out.push_back(sys.sample(u, t));
                                  launched = true;
                                });
  return out;
}

std::vector<double> integrate_theta(const ValidatedScenario& s, const TimeGrid& grid) {
  std::vector<double> out;
  for (const auto& p : solve_parameters(s, grid)) out.push_back(p.trans.theta);
  return out;
}

std::vector<TranslationParams> integrate_translations(const ValidatedScenario& s, const TimeGrid& grid) {
  std::vector<TranslationParams> out;
  for (const auto& p : solve_parameters(s, grid)) out.push_back(p.trans);
  return out;
}

std::vector<ShearParams> integrate_shear(const ValidatedScenario& s, const TimeGrid& grid) {
  std::vector<ShearParams> out;
  for (const auto& p : solve_parameters(s, grid)) out.push_back(p.shear);
  return out;
}

HyperbolaResidual hyperbola_residual(const ParameterSeries& series, const Scenario& s) {
  const double omega0 = reference_omega(s);
  HyperbolaResidual r;
  for (const auto& p : series) {
    const double s2 = std::sin(2.0 * p.shear.delta);
    if (std::abs(s2) < 1e-10) {
      ++r.skipped;
      continue;
    }
    const double a = 0.5 * omega0 * std::exp(p.shear.beta - alpha(s.mass_model, p.t));
    const double u = p.rates.delta / a;
    const double v = (p.rates.gamma - p.rates.beta - p.rates.eta) * s2 / (2.0 * a);
    r.t.push_back(p.t);
    r.residual.push_back(u * u - v * v - 1.0);
  }
  return r;
}

SymplecticMap assemble_map(const TranslationParams& tr, const ShearParams& sh, double t) {
  const double c = std::cos(tr.theta);
  const double s = std::sin(tr.theta);
  Eigen::Matrix2d R;
  R << c, -s, s, c;

  const double cd = std::cos(sh.delta);
  const double sd = std::sin(sh.delta);
  const double em = std::exp(-0.5 * sh.gamma);
  const double ep = std::exp(0.5 * sh.gamma);

  SymplecticMap map;
  map.t = t;
  map.M.block<2, 2>(0, 0) = em * cd * R;
  map.M.block<2, 2>(0, 2) = ep * sd / sh.Delta * R;
  map.M.block<2, 2>(2, 0) = -em * sh.Delta * sd * R;
  map.M.block<2, 2>(2, 2) = ep * cd * R;
  const Eigen::Vector2d lam = R * Eigen::Vector2d(tr.lambda_x, tr.lambda_y);
  const Eigen::Vector2d pi = R * Eigen::Vector2d(tr.pi_x, tr.pi_y);
  map.mu << lam, -pi;
  return map;
}

PhaseState propagate(const SymplecticMap& map, const PhaseState& xi0) { return map.M * xi0 + map.mu; }

SymplecticMap closed_form_constant_field(double t, double m0, double omega0) {
  const double c = std::cos(omega0 * t);
  const double s = std::sin(omega0 * t);
  const double mw = m0 * omega0;
  SymplecticMap map;
  map.t = t;
  // clang-format off
  map.M <<
      0.5 * (1 + c),     0.5 * s,            s / mw,           (1 - c) / mw,
      -0.5 * s,          0.5 * (1 + c),      (c - 1) / mw,     s / mw,
      -0.25 * mw * s,    0.25 * mw * (c - 1), 0.5 * (1 + c),    0.5 * s,
      0.25 * mw * (1 - c), -0.25 * mw * s,    -0.5 * s,         0.5 * (1 + c);
  // clang-format on
  return map;
}

double symplectic_defect(const SymplecticMap& map) {
  const Eigen::Matrix4d B = balanced(map.M);
  const Eigen::Matrix4d J = symplectic_form();
  return (B.transpose() * J * B - J).cwiseAbs().maxCoeff();
}

double balanced_determinant(const SymplecticMap& map) { return balanced(map.M).determinant(); }

PhaseState initial_phase_state(const Scenario& s) {
  const Vec2 p0 = initial_canonical_momentum(s);
  return {s.initial_position.x, s.initial_position.y, p0.x, p0.y};
}

Trajectory classical_trajectory_canonical(const ValidatedScenario& vs, const TimeGrid& grid) {
  const Scenario& s = *vs;
  const PhaseState xi0 = initial_phase_state(s);
  Trajectory out;
  out.reserve(grid.size());
  for (const auto& p : solve_parameters(vs, grid)) {
    const PhaseState xi = propagate(assemble_map(p.trans, p.shear, p.t), xi0);
    const Vec2 A = vector_potential(s.fields, p.t, xi[0], xi[1]);
    const double m = mass(s.mass_model, p.t);
    out.push_back({p.t, xi[0], xi[1], (xi[2] - s.q * A.x) / m, (xi[3] - s.q * A.y) / m});
  }
  return out;
}

void write_parameter_csv(std::ostream& out, const ParameterSeries& series) {
  out << "t,theta,lambda_x,lambda_y,pi_x,pi_y,S,beta,eta,delta,gamma,Delta\n";
  for (const auto& p : series) {
    const auto& a = p.trans;
    const auto& b = p.shear;
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                       p.t, a.theta, a.lambda_x, a.lambda_y, a.pi_x, a.pi_y, a.S, b.beta, b.eta, b.delta, b.gamma,
                       b.Delta);
  }
}

void write_map_csv(std::ostream& out, const ParameterSeries& series) {
  out << "t";
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out << ",M" << i << j;
  out << ",mu0,mu1,mu2,mu3\n";
  for (const auto& p : series) {
    const SymplecticMap map = assemble_map(p.trans, p.shear, p.t);
    out << fmt::format("{:.17g}", p.t);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out << fmt::format(",{:.17g}", map.M(i, j));
    for (int i = 0; i < 4; ++i) out << fmt::format(",{:.17g}", map.mu(i));
    out << '\n';
  }
}

}  // namespace chargedamp
