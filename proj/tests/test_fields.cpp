#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "chargedamp/fields.hpp"
#include "chargedamp/mass_models.hpp"

using namespace chargedamp;

namespace {

constexpr double kQ = -1.602176634e-19;
constexpr double kM0 = 6.103287080005001e-32;

FieldConfig varying() {
  FieldConfig c;
  c.B0 = 0.04;
  c.f = SinusoidalProfile{1.0, 0.3, 2e10, 0.4};
  c.Ex = LinearRampProfile{5.0, 1e9};
  c.Ey = ExponentialProfile{100.0, 3e-10};
  c.kappa0 = 1e-9;
  c.g = SinusoidalProfile{1.0, 0.5, 1e10, 0.0};
  return c;
}

}  // namespace

TEST(Fields, ProfileRatesMatchFiniteDifferences) {
  const std::vector<Profile> profiles{ConstantProfile{3.0}, ExponentialProfile{2.0, 1e-10},
                                      SinusoidalProfile{1.0, 0.5, 3e10, 0.2}, LinearRampProfile{1.0, 4e9}};
  for (const auto& p : profiles) {
    for (double t : {0.0, 1e-11, 7e-11, 2e-10}) {
      const double h = 1e-15;
      EXPECT_NEAR(rate(p, t), (value(p, t + h) - value(p, t - h)) / (2 * h), 1e-5 * (std::abs(rate(p, t)) + 1.0))
          << profile_name(p);
    }
  }
  EXPECT_TRUE(is_constant(ConstantProfile{2.0}));
  EXPECT_FALSE(is_constant(SinusoidalProfile{1.0, 0.5, 3e10, 0.2}));
}

TEST(Fields, VectorPotentialHasCurlB) {
  const FieldConfig c = varying();
  const double t = 3e-11;
  const double h = 1e-9;
  const double x = 2e-6, y = -1e-6;
  const double dAy_dx = (vector_potential(c, t, x + h, y).y - vector_potential(c, t, x - h, y).y) / (2 * h);
  const double dAx_dy = (vector_potential(c, t, x, y + h).x - vector_potential(c, t, x, y - h).x) / (2 * h);
  EXPECT_NEAR(dAy_dx - dAx_dy, field_values(c, t).B, 1e-9 * std::abs(field_values(c, t).B));
}

TEST(Fields, ElectricFieldIsMinusGradPhiMinusDadt) {
  const FieldConfig c = varying();
  const double t = 4e-11, x = 1e-6, y = 3e-6;
  const double hs = 1e-9, ht = 1e-16;
  const double gx = (scalar_potential(c, t, x + hs, y) - scalar_potential(c, t, x - hs, y)) / (2 * hs);
  const double gy = (scalar_potential(c, t, x, y + hs) - scalar_potential(c, t, x, y - hs)) / (2 * hs);
  const Vec2 ap = vector_potential(c, t + ht, x, y);
  const Vec2 am = vector_potential(c, t - ht, x, y);
  const Vec2 e = electric_field(c, t, x, y);
  EXPECT_NEAR(e.x, -gx - (ap.x - am.x) / (2 * ht), 1e-6 * std::abs(e.x));
  EXPECT_NEAR(e.y, -gy - (ap.y - am.y) / (2 * ht), 1e-6 * std::abs(e.y));
}

TEST(Fields, SampleDerivedQuantities) {
  const FieldConfig c = varying();
  const MassModel m = LinearMass{kM0, 56e-12, 0.25};
  const double w0 = reference_cyclotron_frequency(c, m, kQ);
  EXPECT_DOUBLE_EQ(w0, kQ * 0.04 / kM0);
  for (double t : {0.0, 2e-11, 1e-10}) {
    const FieldSample f = sample_fields(c, m, kQ, t);
    EXPECT_NEAR(f.omega, kQ * f.B / mass(m, t), 1e-14 * std::abs(f.omega));
    const double fv = value(c.f, t);
    const double e2b = fv * fv + c.kappa0 * std::exp(alpha(m, t)) * value(c.g, t) / (kM0 * w0 * w0);
    EXPECT_NEAR(std::exp(2 * f.beta), e2b, 1e-13 * e2b);
    const double h = 1e-15;
    const double fd = (sample_fields(c, m, kQ, t + h).beta - sample_fields(c, m, kQ, t - h).beta) / (2 * h);
    EXPECT_NEAR(f.beta_rate, fd, 1e-5 * std::abs(fd) + 1.0);
  }
}

TEST(Fields, BareFieldHasZeroBeta) {
  FieldConfig c;
  c.B0 = 0.04;
  const FieldSample f = sample_fields(c, ConstantMass{kM0}, kQ, 1e-10);
  EXPECT_EQ(f.beta, 0.0);
  EXPECT_EQ(f.beta_rate, 0.0);
}

TEST(Fields, NegativeBetaArgumentIsDomainError) {
  FieldConfig c;
  c.B0 = 0.04;
  c.f = ConstantProfile{0.0};
  c.kappa0 = -1e-12;
  EXPECT_THROW(sample_fields(c, ConstantMass{kM0}, kQ, 0.0), DomainError);
}

TEST(Fields, ConfinementWithoutMagneticFieldIsDomainError) {
  FieldConfig c;
  c.kappa0 = 1e-9;
  EXPECT_THROW(sample_fields(c, ConstantMass{kM0}, kQ, 0.0), DomainError);
}

TEST(Fields, RotationPreservesLengthAndUndoes) {
  for (double th : {0.0, 0.3, -2.0, 7.0}) {
    const Vec2 r = rotated_field(3.0, -4.0, th);
    EXPECT_NEAR(std::hypot(r.x, r.y), 5.0, 1e-14);
    const Vec2 back = rotated_field(r.x, r.y, -th);
    EXPECT_NEAR(back.x, 3.0, 1e-14);
    EXPECT_NEAR(back.y, -4.0, 1e-14);
  }
}
