#pragma once

// Quantum layer: a Gaussian packet evolved exactly by the unitary counterpart of
// the canonical transformations. Everything is expressed through the solved
// parameters (theta, lambda, pi, S, delta, gamma, Delta); hbar enters only here.
//
// The initial packet is centred at the origin:
//   psi0(r) = e^{-|r|^2 / 2a^2} e^{i p0.r / hbar} / (sqrt(pi) a).

#include <complex>
#include <iosfwd>
#include <vector>

#include "chargedamp/canonical.hpp"

namespace chargedamp {

using Complex = std::complex<double>;

struct PacketSpec {
  double a = 50e-9;  ///< initial width, m
  Vec2 p0;           ///< initial momentum, kg m/s
};

/// Width from the scenario, p0 = m(t0) v0 (the packet starts at the origin, where A = 0).
PacketSpec packet_for_scenario(const Scenario& s);

struct PacketState {
  double t = 0.0;
  double sigma = 0.0;
  Vec2 zeta_R;     ///< packet centre
  Vec2 lambda_R;   ///< rotated translation
  Vec2 pi_R;       ///< rotated momentum translation
  Vec2 lambda0_R;  ///< rotated homogeneous part carrying p0
  TranslationParams trans;
  ShearParams shear;
  PacketSpec spec;
  double hbar = codata.hbar;
};

/// sqrt(a^2 e^{-gamma} cos^2 delta + hbar^2 e^{gamma} sin^2 delta / (a^2 Delta^2)).
double sigma(const ShearParams& shear, double a, double hbar = codata.hbar);

/// zeta^R = R(theta) (lambda + e^{gamma/2} sin(delta) p0 / Delta).
Vec2 packet_center(const TranslationParams& trans, const ShearParams& shear, const PacketSpec& spec);

PacketState packet_state(const ParameterSample& p, const PacketSpec& spec, double hbar = codata.hbar);

std::vector<PacketState> evolve_packet(const ValidatedScenario& s, const PacketSpec& spec, const TimeGrid& grid,
                                       double hbar = codata.hbar);

/// (<p> - q A(zeta)) / m(t), <p> taken from the propagated mean momentum.
Vec2 packet_center_velocity(const PacketState& st, const Scenario& s);

Complex initial_packet(double x, double y, const PacketSpec& spec, double hbar = codata.hbar);

/// Closed-form wave function. Finite through caustics: for |sin delta| < 1e-6 the
/// divergent cot(delta) phases are combined analytically before evaluation.
Complex psi(double x, double y, const PacketState& st);

/// e^{-|r - zeta|^2 / sigma^2} / (pi sigma^2).
double probability_density(double x, double y, const PacketState& st);

/// Propagator G(x, y, t | x', y', t0). Throws SingularTimeError when |sin delta| < 1e-12.
Complex greens_function(double x, double y, double xp, double yp, const TranslationParams& trans,
                        const ShearParams& shear, double t, double hbar = codata.hbar);

/// Uniform tensor grid, nodes include both ends.
struct Grid2D {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t nx = 0;
  double y_min = 0.0;
  double y_max = 0.0;
  std::size_t ny = 0;

  double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
  double dy() const { return (y_max - y_min) / static_cast<double>(ny - 1); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
  double y(std::size_t j) const { return y_min + static_cast<double>(j) * dy(); }
  std::size_t size() const { return nx * ny; }
};

/// Square n x n grid of half-width h around c.
Grid2D centered_grid(Vec2 c, double half_width, std::size_t n);

/// Tensor-product trapezoid rule over a row-major (y outer, x inner) sample vector.
double trapezoid_2d(const Grid2D& g, const std::vector<double>& f);

struct DensityMoments {
  double norm = 0.0;
  Vec2 mean;
  Vec2 variance;
};

DensityMoments density_moments(const Grid2D& g, const std::vector<double>& density);

std::vector<Complex> sample_psi(const Grid2D& g, const PacketState& st);
std::vector<double> sample_density(const Grid2D& g, const PacketState& st);

struct GreenQuadrature {
  double half_width_in_a = 8.0;  ///< source box half-width, in units of a
  std::size_t n = 512;           ///< source nodes per axis
  double tolerance = 1e-8;       ///< allowed relative change on halving the node count
};

struct GreenPropagation {
  std::vector<Complex> psi;
  double refinement_change = 0.0;  ///< max |psi_n - psi_{n/2}| / max |psi_n|
};

/// psi(r, t) = sum over the source grid of G(r, t | r') psi0(r') with trapezoid
/// weights. Kernel and Gaussian both factor over x' and y', so the 2D sum is
/// evaluated as a product of two 1D sums (same value, n times cheaper).
/// Throws SingularTimeError for |sin delta| <= 1e-6 and QuadratureError when the
/// refinement check fails.
GreenPropagation propagate_via_green(const PacketState& st, const Grid2D& targets, const GreenQuadrature& q = {});

struct EhrenfestReport {
  std::vector<double> t;
  std::vector<double> center_deviation;     ///< |zeta^R - r_classical|, m
  double trajectory_scale = 0.0;            ///< max |r_classical|, m
  double max_relative_deviation = 0.0;
  double max_inhomogeneous_residual = 0.0;  ///< finite-difference equation-of-motion residual of lambda^R, relative
  double max_homogeneous_residual = 0.0;    ///< same for lambda0^R with the sources removed
};

/// Compares the packet centre with the classical variable-mass trajectory launched
/// from the origin at v0 = p0 / m(t0), and checks by central differences (step
/// fd_step, 0 picks one) that lambda^R and lambda0^R obey the classical equations.
EhrenfestReport ehrenfest_residual(const ValidatedScenario& s, const PacketSpec& spec, const TimeGrid& grid,
                                   double fd_step = 0.0);

/// CSV x,y,density.
void write_density_csv(std::ostream& out, const Grid2D& g, const std::vector<double>& density);
/// One JSON header line (nx, ny, extents, t, dtype), then nx*ny float64 little-endian, row-major.
void write_density_binary(std::ostream& out, const Grid2D& g, const std::vector<double>& density, double t);
/// CSV x,y,density,re,im.
void write_wavefunction_csv(std::ostream& out, const Grid2D& g, const std::vector<Complex>& psi);

}  // namespace chargedamp
