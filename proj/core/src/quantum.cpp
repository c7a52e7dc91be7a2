#include "chargedamp/quantum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace chargedamp {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr double kPsiRegularize = 1e-6;
constexpr double kKernelSingular = 1e-12;
constexpr double kQuadratureSingular = 1e-6;

Vec2 rotate(double theta, double x, double y) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {x * c - y * s, x * s + y * c};
}

// Trapezoid weights times spacing for n nodes over [lo, hi].
std::vector<double> trapezoid_weights(std::size_t n, double lo, double hi) {
  const double h = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

// Source-side factors of the separable Green sum along one axis: nodes x_i and
// g_i = w_i e^{-x_i^2/2a^2} e^{i (chirp x_i^2 + p0 x_i)/hbar}.
struct AxisSum {
  std::vector<double> x;
  std::vector<Complex> g;

  AxisSum(std::size_t n, double half, double a, double chirp, double p0, double hbar) : x(n), g(n) {
    const auto w = trapezoid_weights(n, -half, half);
    const double h = 2.0 * half / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = -half + static_cast<double>(i) * h;
      const double xi = x[i];
      g[i] = w[i] * std::exp(-xi * xi / (2.0 * a * a)) * std::polar(1.0, (chirp * xi * xi + p0 * xi) / hbar);
    }
  }

  // sum_i g_i e^{-i k x_i}
  Complex operator()(double k) const {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) acc += g[i] * std::polar(1.0, -k * x[i]);
    return acc;
  }
};

std::vector<Complex> green_sum(const PacketState& st, const Grid2D& targets, std::size_t n, double half) {
  const auto& tr = st.trans;
  const auto& sh = st.shear;
  const double hbar = st.hbar;
  const double s = std::sin(sh.delta);
  const double cot = std::cos(sh.delta) / s;
  const double chirp = 0.5 * sh.Delta * std::exp(-sh.gamma) * cot;
  const double k_per_w = sh.Delta * std::exp(-0.5 * sh.gamma) / (s * hbar);
  const AxisSum sx(n, half, st.spec.a, chirp, st.spec.p0.x, hbar);
  const AxisSum sy(n, half, st.spec.a, chirp, st.spec.p0.y, hbar);
  const Complex pre = sh.Delta * std::exp(-0.5 * sh.gamma) / (2.0 * std::numbers::pi * I * hbar * s) /
                      (std::sqrt(std::numbers::pi) * st.spec.a);

  const double c = std::cos(tr.theta);
  const double sn = std::sin(tr.theta);
  std::vector<Complex> out(targets.size());
  for (std::size_t j = 0; j < targets.ny; ++j) {
    const double y = targets.y(j);
    for (std::size_t i = 0; i < targets.nx; ++i) {
      const double x = targets.x(i);
      const double wx = x * c + y * sn - tr.lambda_x;
      const double wy = y * c - x * sn - tr.lambda_y;
      const double phase = 0.5 * sh.Delta * cot * (wx * wx + wy * wy) - tr.pi_x * wx - tr.pi_y * wy - tr.S;
      out[j * targets.nx + i] = pre * std::polar(1.0, phase / hbar) * sx(k_per_w * wx) * sy(k_per_w * wy);
    }
  }
  return out;
}

// Residual of m a + mdot v - q (v x B) - q E_induced(r) + kappa r / 4 - [q E_uniform],
// relative to the largest single term.
double motion_residual(const Scenario& s, double t, Vec2 pm, Vec2 p0, Vec2 pp, double h, bool with_source) {
  const FieldValues f = field_values(s.fields, t);
  const double m = mass(s.mass_model, t);
  const double md = mass_rate(s.mass_model, t);
  const Vec2 v{(pp.x - pm.x) / (2.0 * h), (pp.y - pm.y) / (2.0 * h)};
  const Vec2 acc{(pp.x - 2.0 * p0.x + pm.x) / (h * h), (pp.y - 2.0 * p0.y + pm.y) / (h * h)};
  const Vec2 lorentz{s.q * v.y * f.B, -s.q * v.x * f.B};
  const Vec2 induced{0.5 * s.q * f.Bdot * p0.y, -0.5 * s.q * f.Bdot * p0.x};
  const Vec2 confine{0.25 * f.kappa * p0.x, 0.25 * f.kappa * p0.y};
  const Vec2 source = with_source ? Vec2{s.q * f.Ex, s.q * f.Ey} : Vec2{};

  const double rx = m * acc.x + md * v.x - lorentz.x - induced.x + confine.x - source.x;
  const double ry = m * acc.y + md * v.y - lorentz.y - induced.y + confine.y - source.y;
  const double scale = std::max({std::hypot(m * acc.x, m * acc.y), std::hypot(md * v.x, md * v.y),
                                 std::hypot(lorentz.x, lorentz.y), std::hypot(induced.x, induced.y),
                                 std::hypot(confine.x, confine.y), std::hypot(source.x, source.y)});
  if (scale == 0.0) return 0.0;
  return std::hypot(rx, ry) / scale;
}

}  // namespace

PacketSpec packet_for_scenario(const Scenario& s) {
  const double m = mass(s.mass_model, s.t_start);
  return {s.packet_width, {m * s.initial_velocity.x, m * s.initial_velocity.y}};
}

double sigma(const ShearParams& sh, double a, double hbar) {
  const double c = std::cos(sh.delta);
  const double s = std::sin(sh.delta);
  const double spread = hbar * s / (a * sh.Delta);
  return std::sqrt(a * a * std::exp(-sh.gamma) * c * c + std::exp(sh.gamma) * spread * spread);
}

Vec2 packet_center(const TranslationParams& tr, const ShearParams& sh, const PacketSpec& spec) {
  const double k = std::exp(0.5 * sh.gamma) * std::sin(sh.delta) / sh.Delta;
  return rotate(tr.theta, tr.lambda_x + k * spec.p0.x, tr.lambda_y + k * spec.p0.y);
}

PacketState packet_state(const ParameterSample& p, const PacketSpec& spec, double hbar) {
  PacketState st;
  st.t = p.t;
  st.trans = p.trans;
  st.shear = p.shear;
  st.spec = spec;
  st.hbar = hbar;
  st.sigma = sigma(p.shear, spec.a, hbar);
  const double k = std::exp(0.5 * p.shear.gamma) * std::sin(p.shear.delta) / p.shear.Delta;
  st.lambda_R = rotate(p.trans.theta, p.trans.lambda_x, p.trans.lambda_y);
  st.pi_R = rotate(p.trans.theta, p.trans.pi_x, p.trans.pi_y);
  st.lambda0_R = rotate(p.trans.theta, k * spec.p0.x, k * spec.p0.y);
  st.zeta_R = packet_center(p.trans, p.shear, spec);
  return st;
}

std::vector<PacketState> evolve_packet(const ValidatedScenario& s, const PacketSpec& spec, const TimeGrid& grid,
                                       double hbar) {
  std::vector<PacketState> out;
  out.reserve(grid.size());
  for (const auto& p : solve_parameters(s, grid)) out.push_back(packet_state(p, spec, hbar));
  return out;
}

Vec2 packet_center_velocity(const PacketState& st, const Scenario& s) {
  const SymplecticMap map = assemble_map(st.trans, st.shear, st.t);
  const PhaseState mean = propagate(map, PhaseState(0.0, 0.0, st.spec.p0.x, st.spec.p0.y));
  const Vec2 A = vector_potential(s.fields, st.t, mean[0], mean[1]);
  const double m = mass(s.mass_model, st.t);
  return {(mean[2] - s.q * A.x) / m, (mean[3] - s.q * A.y) / m};
}

Complex initial_packet(double x, double y, const PacketSpec& spec, double hbar) {
  const double a = spec.a;
  return std::exp(-(x * x + y * y) / (2.0 * a * a)) / (std::sqrt(std::numbers::pi) * a) *
         std::polar(1.0, (spec.p0.x * x + spec.p0.y * y) / hbar);
}

Complex psi(double x, double y, const PacketState& st) {
  const auto& sh = st.shear;
  const double hbar = st.hbar;
  const double a = st.spec.a;
  const double c = std::cos(sh.delta);
  const double s = std::sin(sh.delta);
  const double eg = std::exp(sh.gamma);
  const double sg2 = st.sigma * st.sigma;

  const Complex z{hbar * std::sqrt(eg) * s / (a * sh.Delta), a * c / std::sqrt(eg)};
  const Complex pre = z / (I * std::sqrt(std::numbers::pi) * sg2);

  const Vec2 u{x - st.zeta_R.x, y - st.zeta_R.y};
  const Vec2 w{x - st.lambda_R.x, y - st.lambda_R.y};
  const double u2 = u.x * u.x + u.y * u.y;
  const double w2 = w.x * w.x + w.y * w.y;

  double phase = -(st.pi_R.x * w.x + st.pi_R.y * w.y) - st.trans.S;
  if (std::abs(s) >= kPsiRegularize) {
    const double cot = c / s;
    phase += -a * a * sh.Delta * cot * u2 / (2.0 * eg * sg2) + 0.5 * sh.Delta * cot * w2;
  } else {
    // Same phase with the two cot(delta) terms merged; w = u + lambda0^R.
    const Vec2 rp0 = rotate(st.trans.theta, st.spec.p0.x, st.spec.p0.y);
    const double p02 = st.spec.p0.x * st.spec.p0.x + st.spec.p0.y * st.spec.p0.y;
    const double spread = hbar * hbar * eg / (a * a * sh.Delta * sh.Delta) - a * a / eg;
    phase += sh.Delta * c * s * spread * u2 / (2.0 * sg2) + c * std::sqrt(eg) * (rp0.x * u.x + rp0.y * u.y) +
             c * s * eg * p02 / (2.0 * sh.Delta);
  }
  return pre * std::exp(-u2 / (2.0 * sg2)) * std::polar(1.0, phase / hbar);
}

double probability_density(double x, double y, const PacketState& st) {
  const double sg2 = st.sigma * st.sigma;
  const double dx = x - st.zeta_R.x;
  const double dy = y - st.zeta_R.y;
  return std::exp(-(dx * dx + dy * dy) / sg2) / (std::numbers::pi * sg2);
}

Complex greens_function(double x, double y, double xp, double yp, const TranslationParams& tr, const ShearParams& sh,
                        double t, double hbar) {
  const double s = std::sin(sh.delta);
  if (std::abs(s) < kKernelSingular) throw SingularTimeError(t, std::abs(s));
  const double cot = std::cos(sh.delta) / s;
  const double em = std::exp(-0.5 * sh.gamma);
  const double c = std::cos(tr.theta);
  const double sn = std::sin(tr.theta);
  const double wx = x * c + y * sn - tr.lambda_x;
  const double wy = y * c - x * sn - tr.lambda_y;
  const double phase = 0.5 * sh.Delta * em * em * cot * (xp * xp + yp * yp) + 0.5 * sh.Delta * cot * (wx * wx + wy * wy) -
                       (tr.pi_x + sh.Delta * xp * em / s) * wx - (tr.pi_y + sh.Delta * yp * em / s) * wy - tr.S;
  return sh.Delta * em / (2.0 * std::numbers::pi * I * hbar * s) * std::polar(1.0, phase / hbar);
}

Grid2D centered_grid(Vec2 c, double half_width, std::size_t n) {
  return {c.x - half_width, c.x + half_width, n, c.y - half_width, c.y + half_width, n};
}

double trapezoid_2d(const Grid2D& g, const std::vector<double>& f) {
  const auto wx = trapezoid_weights(g.nx, g.x_min, g.x_max);
  const auto wy = trapezoid_weights(g.ny, g.y_min, g.y_max);
  double sum = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i) row += wx[i] * f[j * g.nx + i];
    sum += wy[j] * row;
  }
  return sum;
}

DensityMoments density_moments(const Grid2D& g, const std::vector<double>& d) {
  std::vector<double> fx(d.size()), fy(d.size());
  DensityMoments m;
  m.norm = trapezoid_2d(g, d);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      fx[j * g.nx + i] = g.x(i) * d[j * g.nx + i];
      fy[j * g.nx + i] = g.y(j) * d[j * g.nx + i];
    }
  m.mean = {trapezoid_2d(g, fx) / m.norm, trapezoid_2d(g, fy) / m.norm};
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double dx = g.x(i) - m.mean.x;
      const double dy = g.y(j) - m.mean.y;
      fx[j * g.nx + i] = dx * dx * d[j * g.nx + i];
      fy[j * g.nx + i] = dy * dy * d[j * g.nx + i];
    }
  m.variance = {trapezoid_2d(g, fx) / m.norm, trapezoid_2d(g, fy) / m.norm};
  return m;
}

std::vector<Complex> sample_psi(const Grid2D& g, const PacketState& st) {
  std::vector<Complex> out(g.size());
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) out[j * g.nx + i] = psi(g.x(i), g.y(j), st);
  return out;
}

std::vector<double> sample_density(const Grid2D& g, const PacketState& st) {
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) out[j * g.nx + i] = probability_density(g.x(i), g.y(j), st);
  return out;
}

GreenPropagation propagate_via_green(const PacketState& st, const Grid2D& targets, const GreenQuadrature& q) {
  const double s = std::sin(st.shear.delta);
  if (std::abs(s) <= kQuadratureSingular) throw SingularTimeError(st.t, std::abs(s));
  if (q.n < 8) throw QuadratureError("Green quadrature needs at least 8 source nodes per axis");

  const double half = q.half_width_in_a * st.spec.a;
  GreenPropagation out;
  out.psi = green_sum(st, targets, q.n, half);
  const auto coarse = green_sum(st, targets, q.n / 2, half);

  double peak = 0.0;
  double diff = 0.0;
  for (std::size_t i = 0; i < out.psi.size(); ++i) {
    peak = std::max(peak, std::abs(out.psi[i]));
    diff = std::max(diff, std::abs(out.psi[i] - coarse[i]));
  }
  out.refinement_change = peak > 0.0 ? diff / peak : 0.0;
  if (!(out.refinement_change <= q.tolerance)) {
    throw QuadratureError(fmt::format("Green quadrature not converged at t = {:g} s: refinement change {:.3g} > {:.3g}",
                                      st.t, out.refinement_change, q.tolerance));
  }
  return out;
}

EhrenfestReport ehrenfest_residual(const ValidatedScenario& vs, const PacketSpec& spec, const TimeGrid& grid,
                                   double fd_step) {
  const Scenario& s = *vs;
  EhrenfestReport rep;

  Scenario cl = s;
  const double m_start = mass(s.mass_model, s.t_start);
  cl.initial_position = {};
  cl.initial_velocity = {spec.p0.x / m_start, spec.p0.y / m_start};
  const Trajectory classical = integrate_variable_mass(validate_scenario(cl), grid);
  const auto states = evolve_packet(vs, spec, grid);

  for (std::size_t i = 0; i < states.size(); ++i) {
    const double d = std::hypot(states[i].zeta_R.x - classical[i].x, states[i].zeta_R.y - classical[i].y);
    rep.t.push_back(states[i].t);
    rep.center_deviation.push_back(d);
    rep.trajectory_scale = std::max(rep.trajectory_scale, std::hypot(classical[i].x, classical[i].y));
  }
  const double max_dev = rep.center_deviation.empty()
                             ? 0.0
                             : *std::max_element(rep.center_deviation.begin(), rep.center_deviation.end());
  rep.max_relative_deviation = rep.trajectory_scale > 0.0 ? max_dev / rep.trajectory_scale : max_dev;

  // Finite-difference check of the equations of motion at up to 64 interior samples.
  const CharacteristicScales sc = characteristic_scales(s);
  double h = fd_step;
  if (!(h > 0.0)) {
    double min_gap = grid.back() - grid.front();
    for (std::size_t i = 1; i < grid.size(); ++i) min_gap = std::min(min_gap, grid[i] - grid[i - 1]);
    h = std::min(0.25 * min_gap, 1e-2 * sc.time);
  }
  std::vector<double> centres;
  const std::size_t stride = std::max<std::size_t>(1, grid.size() / 64);
  for (std::size_t i = stride; i < grid.size(); i += stride) {
    if (grid[i] - h > grid.front() && grid[i] - grid[i - 1] > 2.0 * h) centres.push_back(grid[i]);
  }
  if (centres.empty()) return rep;

  std::vector<double> fine{grid.front()};
  for (double t : centres) {
    fine.push_back(t - h);
    fine.push_back(t);
    fine.push_back(t + h);
  }
  Scenario tight = s;
  tight.integrator.method = IntegratorConfig::Method::rk45_adaptive;
  tight.integrator.rel_tol = std::min(s.integrator.rel_tol, 1e-12);
  tight.integrator.abs_tol = std::min(s.integrator.abs_tol, 1e-14);
  const auto fs = evolve_packet(validate_scenario(tight), spec, TimeGrid::from_samples(fine));
  for (std::size_t k = 0; k < centres.size(); ++k) {
    const auto& a = fs[1 + 3 * k];
    const auto& b = fs[2 + 3 * k];
    const auto& c = fs[3 + 3 * k];
    rep.max_inhomogeneous_residual = std::max(
        rep.max_inhomogeneous_residual, motion_residual(s, b.t, a.lambda_R, b.lambda_R, c.lambda_R, h, true));
    rep.max_homogeneous_residual = std::max(
        rep.max_homogeneous_residual, motion_residual(s, b.t, a.lambda0_R, b.lambda0_R, c.lambda0_R, h, false));
  }
  return rep;
}

void write_density_csv(std::ostream& out, const Grid2D& g, const std::vector<double>& d) {
  out << "x,y,density\n";
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) out << fmt::format("{:.17g},{:.17g},{:.17g}\n", g.x(i), g.y(j), d[j * g.nx + i]);
}

void write_density_binary(std::ostream& out, const Grid2D& g, const std::vector<double>& d, double t) {
  const nlohmann::json header = {{"nx", g.nx},       {"ny", g.ny},       {"x_min", g.x_min}, {"x_max", g.x_max},
                                 {"y_min", g.y_min}, {"y_max", g.y_max}, {"t", t},
                                 {"dtype", "float64-le"}, {"order", "row-major, y outer"}};
  out << header.dump() << '\n';
  for (double v : d) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
}

void write_wavefunction_csv(std::ostream& out, const Grid2D& g, const std::vector<Complex>& p) {
  out << "x,y,density,re,im\n";
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const Complex v = p[j * g.nx + i];
      out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", g.x(i), g.y(j), std::norm(v), v.real(), v.imag());
    }
}

}  // namespace chargedamp
