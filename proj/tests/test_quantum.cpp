#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "chargedamp/quantum.hpp"

using namespace chargedamp;

namespace {

Scenario tight(Scenario s) {
  s.integrator.rel_tol = 1e-13;
  s.integrator.abs_tol = 1e-15;
  return s;
}

std::vector<PacketState> states_at(const Scenario& s, std::vector<double> times) {
  return evolve_packet(validate_scenario(s), packet_for_scenario(s), TimeGrid::from_samples(std::move(times)));
}

// H psi for H = |p - q A|^2 / 2m + q phi + kappa |r|^2 / 8 in the symmetric gauge,
// derivatives by central differences of the closed-form psi.
struct HamiltonianTerms {
  Complex value;
  double magnitude;  // sum of |individual terms|
};

HamiltonianTerms apply_hamiltonian(const Scenario& s, const PacketState& st, double x, double y, double h) {
  const double hbar = st.hbar;
  const double m = mass(s.mass_model, st.t);
  const FieldValues f = field_values(s.fields, st.t);
  const Complex c = psi(x, y, st);
  const Complex xp = psi(x + h, y, st), xm = psi(x - h, y, st);
  const Complex yp = psi(x, y + h, st), ym = psi(x, y - h, st);
  const Complex lap = (xp + xm + yp + ym - 4.0 * c) / (h * h);
  const Complex dx = (xp - xm) / (2 * h), dy = (yp - ym) / (2 * h);
  const Vec2 A = vector_potential(s.fields, st.t, x, y);
  const Complex I(0, 1);
  const Complex kinetic = -hbar * hbar / (2 * m) * lap;
  const Complex cross = I * hbar * s.q / m * (A.x * dx + A.y * dy);
  const Complex diamag = s.q * s.q * (A.x * A.x + A.y * A.y) / (2 * m) * c;
  const Complex potential = (s.q * scalar_potential(s.fields, st.t, x, y) + 0.125 * f.kappa * (x * x + y * y)) * c;
  return {kinetic + cross + diamag + potential,
          std::abs(kinetic) + std::abs(cross) + std::abs(diamag) + std::abs(potential)};
}

double schrodinger_residual(const Scenario& s, double t, double ht) {
  const auto st = states_at(s, {s.t_start, t - ht, t, t + ht});
  const auto& mid = st[2];
  const double hs = 2e-3 * mid.sigma;
  double worst = 0.0;
  for (double u : {-1.0, -0.3, 0.0, 0.5, 1.2}) {
    for (double v : {-0.8, 0.0, 0.7}) {
      const double x = mid.zeta_R.x + u * mid.sigma, y = mid.zeta_R.y + v * mid.sigma;
      const Complex dpsi = (psi(x, y, st[3]) - psi(x, y, st[1])) / (2 * ht);
      const auto H = apply_hamiltonian(s, mid, x, y, hs);
      const Complex lhs = Complex(0, mid.hbar) * dpsi;
      worst = std::max(worst, std::abs(lhs - H.value) / (H.magnitude + std::abs(lhs)));
    }
  }
  return worst;
}

}  // namespace

TEST(Quantum, WidthStartsExactlyAtA) {
  const Scenario s = gaas_scenario();
  const auto st = states_at(s, {0.0, 1e-12});
  EXPECT_EQ(st[0].sigma, s.packet_width);
  EXPECT_EQ(sigma(ShearParams{0, 0, 0, 1e-21, 0}, 50e-9), 50e-9);
}

TEST(Quantum, InitialStateMatchesInitialPacket) {
  const Scenario s = gaas_scenario();
  const auto st = states_at(s, {0.0, 1e-12});
  const PacketSpec spec = packet_for_scenario(s);
  for (double x : {-60e-9, 0.0, 17e-9}) {
    for (double y : {-20e-9, 40e-9}) {
      const Complex a = psi(x, y, st[0]);
      const Complex b = initial_packet(x, y, spec);
      EXPECT_NEAR(std::abs(a - b), 0.0, 1e-12 * std::abs(b));
    }
  }
}

TEST(Quantum, SatisfiesSchrodingerEquation) {
  struct Case {
    const char* name;
    Scenario s;
    double t;
  };
  std::vector<Case> cases;
  cases.push_back({"linear", tight(gaas_scenario()), 20e-12});
  Scenario kc = tight(gaas_scenario());
  kc.mass_model = KanaiCaldirolaMass{reference_mass(kc.mass_model), 56e-12};
  cases.push_back({"kanai_caldirola", kc, 30e-12});
  Scenario conf = tight(gaas_scenario());
  conf.mass_model = ConstantMass{reference_mass(conf.mass_model)};
  const double w0 = reference_cyclotron_frequency(conf.fields, conf.mass_model, conf.q);
  conf.fields.kappa0 = 0.4 * reference_mass(conf.mass_model) * w0 * w0;
  conf.fields.Ex = SinusoidalProfile{0.0, 80.0, 2e10, 0.0};
  cases.push_back({"confined_oscillating_E", conf, 40e-12});
  for (const auto& c : cases) {
    EXPECT_LT(schrodinger_residual(c.s, c.t, 2e-16), 1e-5) << c.name;
  }
}

TEST(Quantum, DensityIsGaussianOfWidthSigma) {
  const Scenario s = gaas_scenario();
  const auto st = states_at(s, {0.0, 5e-12, 37e-12, 1e-9});
  for (const auto& p : st) {
    for (double u : {0.0, 0.4, 1.7}) {
      const double x = p.zeta_R.x + u * p.sigma, y = p.zeta_R.y - 0.3 * p.sigma;
      EXPECT_NEAR(std::norm(psi(x, y, p)), probability_density(x, y, p), 1e-10 * probability_density(x, y, p));
    }
  }
}

TEST(Quantum, NormAndMomentsOnGrid) {
  const Scenario s = gaas_scenario();
  for (const auto& p : states_at(s, {0.0, 3e-12, 20e-12, 500e-12, 5e-9})) {
    const auto g = centered_grid(p.zeta_R, 5 * p.sigma, 201);
    const auto d = sample_density(g, p);
    const auto m = density_moments(g, d);
    EXPECT_NEAR(m.norm, 1.0, 1e-6);
    EXPECT_NEAR(m.mean.x, p.zeta_R.x, 1e-8 * p.sigma);
    EXPECT_NEAR(m.mean.y, p.zeta_R.y, 1e-8 * p.sigma);
    EXPECT_NEAR(std::sqrt(2 * m.variance.x), p.sigma, 1e-5 * p.sigma);
    EXPECT_NEAR(std::sqrt(2 * m.variance.y), p.sigma, 1e-5 * p.sigma);
  }
}

TEST(Quantum, TrapezoidIntegratesPolynomialsExactly) {
  const Grid2D g{0.0, 2.0, 5, -1.0, 1.0, 9};
  std::vector<double> f;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) f.push_back(g.x(i) + 3 * g.y(j) + 1);
  EXPECT_NEAR(trapezoid_2d(g, f), 2 * 2 * (1 + 1), 1e-14);
}

TEST(Quantum, PacketCentreFollowsClassicalTrajectory) {
  const Scenario s = gaas_scenario();
  auto w = s;
  w.t_end = 5e-9;
  const auto rep = ehrenfest_residual(validate_scenario(w), packet_for_scenario(w), TimeGrid::for_scenario(w));
  EXPECT_LT(rep.max_relative_deviation, 1e-6);
  EXPECT_LT(rep.max_inhomogeneous_residual, 1e-4);
  EXPECT_LT(rep.max_homogeneous_residual, 1e-4);
  EXPECT_EQ(rep.t.size(), rep.center_deviation.size());
}

TEST(Quantum, PacketCentreVelocityLiesOnVariableMassCurve) {
  Scenario s = gaas_scenario();
  s.t_end = 3e-9;
  const auto vs = validate_scenario(s);
  const auto grid = TimeGrid::for_scenario(s);
  const auto traj = integrate_variable_mass(vs, grid);
  const auto st = evolve_packet(vs, packet_for_scenario(s), grid);
  for (std::size_t i = 0; i < st.size(); i += 101) {
    const Vec2 v = packet_center_velocity(st[i], s);
    EXPECT_NEAR(v.x, traj[i].vx, 1e-6 * 3700);
    EXPECT_NEAR(v.y, traj[i].vy, 1e-6 * 3700);
  }
}

TEST(Quantum, GreenQuadratureReproducesClosedForm) {
  const Scenario s = gaas_scenario();
  for (const auto& p : states_at(s, {0.0, 5e-12, 20e-12})) {
    if (p.t == 0.0) continue;
    const auto targets = centered_grid(p.zeta_R, 4 * p.sigma, 32);
    const auto g = propagate_via_green(p, targets);
    const auto c = sample_psi(targets, p);
    double peak = 0.0;
    for (const auto& v : c) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (std::abs(c[i]) > 1e-3 * peak) {
        ASSERT_LT(std::abs(g.psi[i] - c[i]) / std::abs(c[i]), 1e-4);
      }
    }
    EXPECT_LT(g.refinement_change, 1e-8);
  }
}

TEST(Quantum, FactorizedGreenSumEqualsBruteForce2DSum) {
  const Scenario s = gaas_scenario();
  const auto p = states_at(s, {0.0, 7e-12})[1];
  const std::size_t n = 48;
  const double half = 8 * p.spec.a;
  const auto targets = centered_grid(p.zeta_R, 2 * p.sigma, 3);
  const auto fast = propagate_via_green(p, targets, {8.0, n, 1.0});
  const double h = 2 * half / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double x = targets.x(k % targets.nx), y = targets.y(k / targets.nx);
    Complex sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double yp = -half + static_cast<double>(j) * h;
      const double wy = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double xp = -half + static_cast<double>(i) * h;
        const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        sum += wx * wy * h * h * greens_function(x, y, xp, yp, p.trans, p.shear, p.t) * initial_packet(xp, yp, p.spec);
      }
    }
    EXPECT_NEAR(std::abs(fast.psi[k] - sum), 0.0, 1e-10 * std::abs(sum)) << k;
  }
}

TEST(Quantum, CausticsAreReported) {
  Scenario s = gaas_scenario();
  const auto st = states_at(s, {0.0, 1e-13})[1];
  PacketState at_caustic = st;
  at_caustic.shear.delta = std::numbers::pi;
  EXPECT_THROW(greens_function(0, 0, 0, 0, at_caustic.trans, at_caustic.shear, st.t), SingularTimeError);
  EXPECT_THROW(propagate_via_green(at_caustic, centered_grid({}, 1e-7, 4)), SingularTimeError);
  // psi itself stays finite and continuous through the caustic.
  const Complex a = psi(1e-8, 2e-8, at_caustic);
  at_caustic.shear.delta = std::numbers::pi + 1e-9;
  const Complex b = psi(1e-8, 2e-8, at_caustic);
  EXPECT_TRUE(std::isfinite(std::abs(a)));
  EXPECT_NEAR(std::abs(a - b), 0.0, 1e-6 * std::abs(a));
}

TEST(Quantum, UnconvergedQuadratureIsReported) {
  const auto p = states_at(gaas_scenario(), {0.0, 20e-12})[1];
  EXPECT_THROW(propagate_via_green(p, centered_grid(p.zeta_R, p.sigma, 4), {1.0, 16, 1e-12}), QuadratureError);
}

TEST(Quantum, DensityWriters) {
  const Grid2D g{0.0, 1.0, 2, 0.0, 2.0, 3};
  const std::vector<double> d{1, 2, 3, 4, 5, 6};
  std::ostringstream csv_out;
  write_density_csv(csv_out, g, d);
  const std::string csv = csv_out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,y,density");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);

  std::ostringstream bin(std::ios::binary);
  write_density_binary(bin, g, d, 1e-12);
  const std::string b = bin.str();
  const auto nl = b.find('\n');
  ASSERT_NE(nl, std::string::npos);
  EXPECT_NE(b.substr(0, nl).find("\"nx\":2"), std::string::npos);
  ASSERT_EQ(b.size() - nl - 1, 6 * sizeof(double));
  double v;
  std::memcpy(&v, b.data() + nl + 1 + 5 * sizeof(double), sizeof v);
  EXPECT_EQ(v, 6.0);

  std::ostringstream wf_out;
  write_wavefunction_csv(wf_out, g, std::vector<Complex>(6, Complex(3, 4)));
  const std::string wf = wf_out.str();
  EXPECT_EQ(wf.substr(0, wf.find('\n')), "x,y,density,re,im");
  EXPECT_NE(wf.find(",25,3,4"), std::string::npos);
}
