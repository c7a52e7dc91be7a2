#pragma once

// Time-dependent mass laws m(t) and the quantities derived from them:
// the rate dm/dt, the log-ratio alpha(t) = ln(m(t)/m0) and its rate.
//
// All four laws are closed forms with analytic derivatives. Nothing here is
// ever finite-differenced because these values feed ODE right-hand sides.

#include <string_view>
#include <variant>
#include <vector>

#include "chargedamp/errors.hpp"

namespace chargedamp {

/// m(t) = m0
struct ConstantMass {
  double m0;
  friend bool operator==(const ConstantMass&, const ConstantMass&) = default;
};

/// m(t) = m0 e^{t/tau}
struct KanaiCaldirolaMass {
  double m0;
  double tau;
  friend bool operator==(const KanaiCaldirolaMass&, const KanaiCaldirolaMass&) = default;
};

/// m(t) = m0 (t/tau + k); positive only for t > -k tau.
struct LinearMass {
  double m0;
  double tau;
  double k = 1.0;
  friend bool operator==(const LinearMass&, const LinearMass&) = default;
};

/// m(t) = m0 ln(1 + e^{t/tau}); positive for every finite t.
struct LogInterpMass {
  double m0;
  double tau;
  friend bool operator==(const LogInterpMass&, const LogInterpMass&) = default;
};

using MassModel = std::variant<ConstantMass, KanaiCaldirolaMass, LinearMass, LogInterpMass>;

/// Scenario-file name of the variant: constant | kanai_caldirola | linear | log_interp.
std::string_view model_name(const MassModel& model);

/// The reference mass m0 of any variant.
double reference_mass(const MassModel& model);

/// The decay time tau, or 0 for the constant model.
double decay_time(const MassModel& model);

/// Parameter sanity (m0 > 0, tau > 0, k > 0). Returns human-readable problems.
std::vector<std::string> parameter_problems(const MassModel& model);

// The evaluators throw DomainError when m(t) <= 0.
double mass(const MassModel& model, double t);
double mass_rate(const MassModel& model, double t);
double alpha(const MassModel& model, double t);
double alpha_rate(const MassModel& model, double t);

/// Masses the log-interpolating law approaches on either side.
struct InterpolationLimits {
  double kanai_caldirola;    ///< m0 e^{t/tau}, the t -> -infinity limit
  double linear_asymptote;   ///< m0 t/tau, the linear law with k = 0, the t -> +infinity limit
};

InterpolationLimits asymptotic_interpolation_check(const LogInterpMass& model, double t);

}  // namespace chargedamp
