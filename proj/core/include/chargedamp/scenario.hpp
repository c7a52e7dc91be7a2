#pragma once

#include <vector>

#include "chargedamp/errors.hpp"
#include "chargedamp/fields.hpp"
#include "chargedamp/integrator.hpp"
#include "chargedamp/mass_models.hpp"

namespace chargedamp {

struct PhysicalConstants {
  double elementary_charge;  ///< C
  double electron_mass;      ///< kg
  double hbar;               ///< J s
};

/// CODATA 2018 exact/recommended values.
inline constexpr PhysicalConstants codata{1.602176634e-19, 9.1093837015e-31, 1.054571817e-34};

/// A particle in crossed fields over an integration window.
struct Scenario {
  double q = 0.0;  ///< signed charge, C
  MassModel mass_model = ConstantMass{1.0};
  FieldConfig fields;
  Vec2 initial_position;  ///< m
  Vec2 initial_velocity;  ///< m/s
  double t_start = 0.0;
  double t_end = 0.0;
  double output_stride = 0.0;

  double packet_width = 50e-9;  ///< initial Gaussian width a, m
  IntegratorConfig integrator;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// A scenario that passed validate_scenario. Immutable.
class ValidatedScenario {
 public:
  const Scenario& get() const noexcept { return s_; }
  const Scenario* operator->() const noexcept { return &s_; }
  const Scenario& operator*() const noexcept { return s_; }

 private:
  explicit ValidatedScenario(Scenario s) : s_(std::move(s)) {}
  friend ValidatedScenario validate_scenario(Scenario s);

  Scenario s_;
};

/// Checks window, stride, parameters and mass positivity (sampled at a tenth of
/// the output stride). Throws ValidationError listing every violation.
ValidatedScenario validate_scenario(Scenario s);

/// Per-carrier collision time tau = mobility * m_eff / e.
double collision_time_from_mobility(double mobility, double effective_mass_ratio,
                                    const PhysicalConstants& constants = codata);

class TimeGrid {
 public:
  /// t_start, t_start + stride, ..., closing exactly on t_end.
  static TimeGrid uniform(double t_start, double t_end, double stride);
  static TimeGrid for_scenario(const Scenario& s) { return uniform(s.t_start, s.t_end, s.output_stride); }
  /// Throws ValidationError unless strictly increasing with at least one sample.
  static TimeGrid from_samples(std::vector<double> samples);

  const std::vector<double>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const { return samples_[i]; }
  double front() const { return samples_.front(); }
  double back() const { return samples_.back(); }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

 private:
  explicit TimeGrid(std::vector<double> s) : samples_(std::move(s)) {}
  std::vector<double> samples_;
};

/// Natural units of a scenario, used to scale ODE states.
struct CharacteristicScales {
  double time;      ///< s
  double speed;     ///< m/s
  double length;    ///< m
  double momentum;  ///< kg m/s
};

CharacteristicScales characteristic_scales(const Scenario& s);

/// Canonical momentum p = m(t0) v0 + q A(r0).
Vec2 initial_canonical_momentum(const Scenario& s);

/// The GaAs example: electron with m0 = 0.067 m_e, tau = 56 ps, B = 40 mT,
/// E = 100 V/m along y, launched from the origin at 3.7 km/s along y, under the
/// linear mass law with offset k. Window [0, 10 ns], 1 ps stride.
Scenario gaas_scenario(double k = 0.25);

}  // namespace chargedamp
