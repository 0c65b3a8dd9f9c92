#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "nls/error.hpp"
#include "nls/spectral_grid.hpp"

namespace nls {

/// Semiclassical parameter, nonlinearity exponent, mass constraint, dimension.
struct PhysicalParams {
  double epsilon = 1.0;
  double p = 0.2;
  double mass = 1.0;
  int dims = 2;

  /// Throws ConfigError unless eps > 0, m > 0, N in {1,2,3} and 0 < p < 2/N.
  void validate() const;
  /// eps^(-N p / 2), the nonlinear coupling of the scaled gradient flow.
  double flow_coupling() const { return std::pow(epsilon, -0.5 * dims * p); }
  /// Target discrete mass m eps^N of a scaled profile.
  double scaled_mass() const { return mass * std::pow(epsilon, dims); }
};

struct FlowConfig {
  /// Steady state once |E_n - E_{n-1}| <= energy_tol * k_n * |E_n| holds on
  /// two consecutive accepted steps.
  double energy_tol = 1e-12;
  /// Accept a step when the embedded estimate is <= step_tol * ||R||.
  double step_tol = 1e-8;
  double k_init = 1e-3;
  double k_max = 1.0;
  std::size_t max_steps = 200000;
  bool renormalize = true;

  void validate() const;
};

struct GroundStateResult {
  SpectralField profile;  ///< R_inf >= 0, real-space samples with zero imaginary part
  PhysicalParams params;
  double lambda_inf = 0.0;  ///< Lambda(R_inf), negative
  double lambda_hat = 0.0;  ///< -lambda_inf, eigenvalue of the elliptic problem
  double energy = 0.0;
  double residual = 0.0;
  double steady_time = 0.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  /// Largest |Im R| / max |R| seen on the final inverse transform.
  double max_imaginary = 0.0;
};

/// Per accepted step report from solve_ground_state.
struct FlowStep {
  std::size_t step = 0;
  double t = 0.0;
  double k = 0.0;
  double energy = 0.0;
  double mass = 0.0;  ///< before renormalization
  double error_estimate = 0.0;
};
using FlowMonitor = std::function<void(const FlowStep&)>;

/// Closed-form energy coefficients of the Gaussian family,
/// E(R^sigma) = sigma^2 a - sigma^(Np) b, and the minimizing sigma.
struct GaussianCoefficients {
  double a = 0.0;
  double b = 0.0;
  double sigma = 0.0;
};
GaussianCoefficients gaussian_coefficients(const PhysicalParams& params);

/// Samples R^sigma(X) centered at the origin without renormalizing.
SpectralField gaussian_profile(const GridSpec& grid, const PhysicalParams& params, double sigma);

/// Minimal-energy member of the Gaussian family, discrete mass rescaled to m eps^N.
SpectralField gaussian_seed(const GridSpec& grid, const PhysicalParams& params);

/// Scaled energy (eps/2) int |grad R|^2 - eps^(-Np/2)/(p+1) int |R|^(2p+2).
double energy(const SpectralField& field, const PhysicalParams& params, const SpectralContext& ctx);

/// Lagrange multiplier Lambda(R). Throws NumericError for a zero-mass field.
double lambda_functional(const SpectralField& field, const PhysicalParams& params,
                         const SpectralContext& ctx);

/// Fourier coefficients of eps^(-Np/2) R^(2p+1) + Lambda(R) R for a real-space R.
/// Negative undershoots are clamped to zero before the fractional power.
SpectralField flow_rhs_nonlinear(const SpectralField& field, const PhysicalParams& params,
                                 const SpectralContext& ctx);

/// (e^z - 1) / z with phi1(0) = 1.
double phi1(double z);
/// (e^z - 1 - z) / z^2 with phi2(0) = 1/2.
double phi2(double z);

/// Result of one exponential Runge-Kutta step on a coefficient vector.
struct Erk2Update {
  ComplexBuffer next;
  /// sum |next - embedded|^2, unweighted
  double error_sq = 0.0;
};

/// Second-order exponential Runge-Kutta step for u' = L u + f(u, t) with
/// diagonal L, using the exponential Euler stage as embedded solution.
///
///   u2    = e^{kL} u + k phi1(kL) f(u, t)
///   u_new = u2 + k phi2(kL) (f(u2, t + k) - f(u, t))
///
/// `f` maps (const ComplexBuffer&, double t) to a ComplexBuffer.
template <class Nonlinear>
Erk2Update exponential_rk2(const ComplexBuffer& u, std::span<const double> linear, double k,
                           double t, Nonlinear&& f) {
  const std::size_t n = u.size();
  ComplexBuffer stage(n);
  std::vector<double> e(n), p1(n), p2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = k * linear[i];
    e[i] = std::exp(z);
    p1[i] = phi1(z);
    p2[i] = phi2(z);
  }
  const ComplexBuffer f1 = f(u, t);
  for (std::size_t i = 0; i < n; ++i) stage[i] = e[i] * u[i] + k * p1[i] * f1[i];
  const ComplexBuffer f2 = f(stage, t + k);
  Erk2Update out{ComplexBuffer(n), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const Complex correction = k * p2[i] * (f2[i] - f1[i]);
    out.next[i] = stage[i] + correction;
    out.error_sq += std::norm(correction);
  }
  return out;
}

struct Erk2Step {
  SpectralField next;  ///< Fourier space
  /// Discrete L2 norm of the difference between the second-order and the
  /// exponential Euler solutions.
  double error_estimate = 0.0;
};

/// One step of the scaled gradient flow, R_t = (eps/2) Lap R + f(R).
/// Throws NumericError when the result is not finite.
Erk2Step erk2_step(const SpectralField& field_hat, double k, const PhysicalParams& params,
                   const SpectralContext& ctx);

/// Integrates the normalized gradient flow from the Gaussian seed to a steady state.
GroundStateResult solve_ground_state(const GridSpec& grid, const PhysicalParams& params,
                                     const FlowConfig& config, const FlowMonitor& monitor = {});

/// || (eps/2) Lap R + eps^(-Np/2) R^(2p+1) - lambda_hat R || / ||R||, which is
/// the relative residual of the elliptic problem written in scaled variables.
double elliptic_residual(const SpectralField& profile, const PhysicalParams& params,
                         double lambda_hat, const SpectralContext& ctx);

/// r2(X) = mu r1(gamma X) with gamma = (l2/l1)^(1/2), mu = (l2/l1)^(1/(2p)).
/// Samples are obtained by trigonometric interpolation; points whose
/// preimage leaves the domain are set to zero.
SpectralField rescale_profile(const SpectralField& profile, double lambda_from, double lambda_to,
                              double p);

/// max |R(X) - R(-X)| over the grid.
double mirror_defect(const SpectralField& profile);

/// Average of Re R over annuli of width `bin_width` around the origin, up to
/// the radius of the largest inscribed ball.
std::vector<double> radial_average(const SpectralField& profile, double bin_width);

}  // namespace nls
