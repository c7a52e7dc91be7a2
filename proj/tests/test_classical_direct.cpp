#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "chargedamp/classical_direct.hpp"
#include "oracles.hpp"

using namespace chargedamp;

namespace {

Scenario window(Scenario s, double t_end, double stride) {
  s.t_end = t_end;
  s.output_stride = stride;
  return s;
}

double rel(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y) / std::hypot(b.x, b.y); }

}  // namespace

TEST(Classical, NewtonianMatchesDragClosedForm) {
  const Scenario s = window(gaas_scenario(), 2e-9, 1e-12);
  const auto traj = integrate_newtonian(validate_scenario(s), TimeGrid::for_scenario(s));
  const double m0 = reference_mass(s.mass_model);
  for (std::size_t i = 0; i < traj.size(); i += 97) {
    const Vec2 v = oracle::drag_velocity(traj[i].t, s.q, m0, 56e-12, 0.04, {0.0, 100.0}, s.initial_velocity);
    EXPECT_LT(rel({traj[i].vx, traj[i].vy}, v), 1e-7) << "t=" << traj[i].t;
  }
}

TEST(Classical, StationaryVelocityAgreesWithMultiprecision) {
  const double q = -1.602176634e-19;
  for (double mdot : {1e-21, 1.0897e-21, 5e-20}) {
    for (double B : {0.0, 0.04, -1.0}) {
      const Vec2 v = stationary_velocity_general(mdot, B, 30.0, 100.0, q);
      const Vec2 o = oracle::stationary_velocity(mdot, B, 30.0, 100.0, q);
      EXPECT_LT(rel(v, o), 1e-14);
    }
  }
  EXPECT_THROW(stationary_velocity_general(0.0, 0.0, 1.0, 1.0, q), DomainError);
}

TEST(Classical, LtdmmStationaryVelocityUsesMassSlope) {
  const Scenario s = gaas_scenario();
  const double mdot = reference_mass(s.mass_model) / 56e-12;
  const Vec2 v = stationary_velocity_ltdmm(s);
  const Vec2 o = oracle::stationary_velocity(mdot, 0.04, 0.0, 100.0, s.q);
  EXPECT_LT(rel(v, o), 1e-14);
  Scenario kc = s;
  kc.mass_model = KanaiCaldirolaMass{reference_mass(s.mass_model), 56e-12};
  EXPECT_THROW(stationary_velocity_ltdmm(kc), WrongModelError);
}

TEST(Classical, BothModelsReachTheSameStationaryState) {
  const Scenario s = gaas_scenario();
  const auto vs = validate_scenario(s);
  const auto grid = TimeGrid::for_scenario(s);
  const Vec2 v_inf = stationary_velocity_ltdmm(s);
  const auto n = integrate_newtonian(vs, grid).back();
  const auto l = integrate_variable_mass(vs, grid).back();
  EXPECT_LT(rel({n.vx, n.vy}, v_inf), 5e-3);
  EXPECT_LT(rel({l.vx, l.vy}, v_inf), 5e-3);
}

TEST(Classical, ConstantMassWithoutElectricFieldConservesSpeed) {
  Scenario s = window(gaas_scenario(), 1e-9, 1e-12);
  s.mass_model = ConstantMass{reference_mass(s.mass_model)};
  s.fields.Ey = ConstantProfile{0.0};
  const auto traj = integrate_variable_mass(validate_scenario(s), TimeGrid::for_scenario(s));
  for (const auto& k : traj) EXPECT_NEAR(std::hypot(k.vx, k.vy), 3700.0, 3700.0 * 1e-8);
}

TEST(Classical, KanaiCaldirolaVelocityDecaysToZero) {
  Scenario s = window(gaas_scenario(), 20 * 56e-12, 1e-12);
  s.mass_model = KanaiCaldirolaMass{reference_mass(s.mass_model), 56e-12};
  const auto traj = integrate_variable_mass(validate_scenario(s), TimeGrid::for_scenario(s));
  const double v_end = std::hypot(traj.back().vx, traj.back().vy);
  EXPECT_LT(v_end, 1e-2 * std::hypot(stationary_velocity_ltdmm(gaas_scenario()).x,
                                     stationary_velocity_ltdmm(gaas_scenario()).y));
}

TEST(Classical, VariableMassMomentumBalance) {
  // d(m v)/dt = q (E + v x B): check by central differences at interior samples.
  const Scenario s = window(gaas_scenario(), 1e-10, 1e-15);
  auto tight = s;
  tight.integrator.rel_tol = 1e-12;
  tight.integrator.abs_tol = 1e-14;
  const auto traj = integrate_variable_mass(validate_scenario(tight), TimeGrid::for_scenario(tight));
  for (std::size_t i = 1; i + 1 < traj.size(); i += 6131) {
    const double h = traj[i + 1].t - traj[i].t;
    const auto& a = traj[i - 1];
    const auto& c = traj[i + 1];
    const double ma = mass(s.mass_model, a.t), mc = mass(s.mass_model, c.t);
    const double dpx = (mc * c.vx - ma * a.vx) / (2 * h);
    const double dpy = (mc * c.vy - ma * a.vy) / (2 * h);
    const double fx = s.q * (traj[i].vy * 0.04);
    const double fy = s.q * (100.0 - traj[i].vx * 0.04);
    const double scale = std::abs(s.q) * 100.0;
    EXPECT_NEAR(dpx, fx, 1e-4 * scale);
    EXPECT_NEAR(dpy, fy, 1e-4 * scale);
  }
}

TEST(Classical, SettlingTime) {
  Trajectory t;
  for (int i = 0; i <= 10; ++i) t.push_back({i * 1.0, 0, 0, i < 6 ? 0.5 : 1.0, 0.0});
  t[8].vx = 0.995;  // inside 1%: still settled
  EXPECT_EQ(settling_time(t, {1.0, 0.0}).value(), 6.0);
  t.back().vx = 0.5;
  EXPECT_FALSE(settling_time(t, {1.0, 0.0}).has_value());
}

TEST(Classical, SaturationOrderingOnGaas) {
  const Scenario s = gaas_scenario();
  const auto vs = validate_scenario(s);
  const auto grid = TimeGrid::for_scenario(s);
  const Vec2 v_inf = stationary_velocity_ltdmm(s);
  const auto tn = settling_time(integrate_newtonian(vs, grid), v_inf);
  const auto tl = settling_time(integrate_variable_mass(vs, grid), v_inf);
  ASSERT_TRUE(tn && tl);
  EXPECT_LE(*tn, 1.5e-9);
  EXPECT_GE(*tl, 1.5e-9);
  EXPECT_LE(*tl, 4e-9);
}

TEST(Classical, Rk4AndAdaptiveAgree) {
  Scenario s = window(gaas_scenario(), 1e-9, 1e-12);
  const auto a = integrate_variable_mass(validate_scenario(s), TimeGrid::for_scenario(s));
  s.integrator.method = IntegratorConfig::Method::rk4_fixed;
  s.integrator.fixed_step = 1e-13;
  const auto b = integrate_variable_mass(validate_scenario(s), TimeGrid::for_scenario(s));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(rel({b[i].vx, b[i].vy}, {a[i].vx, a[i].vy}), 1e-6);
}

TEST(Classical, CsvHasHeaderAndFullPrecision) {
  std::ostringstream out;
  write_trajectory_csv(out, {{0.1, 1.0 / 3.0, 2.0, 3.0, 4.0}});
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x,y,vx,vy");
  EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Classical, NonFiniteStateIsSolverErrorNamingOperation) {
  Scenario s = window(gaas_scenario(), 1e-9, 1e-12);
  s.initial_velocity = {1e308, 1e308};
  try {
    integrate_newtonian(validate_scenario(s), TimeGrid::for_scenario(s));
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.operation(), "integrate_newtonian");
  }
}
