#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nls/spectral_grid.hpp"

namespace nls {

/// External potential V(x) in physical coordinates together with its gradient.
class Potential {
 public:
  using Scalar = std::function<double(const Vec&)>;
  using Gradient = std::function<Vec(const Vec&)>;

  /// V(x) = sum_d omega_d^2 x_d^2. Throws ConfigError unless every omega_d > 0.
  static Potential harmonic(int dims, const Vec& omega);
  /// Arbitrary smooth potential; the caller guarantees `grad` matches `value`.
  static Potential custom(int dims, Scalar value, Gradient grad);

  double value(const Vec& x) const { return value_(x); }
  Vec gradient(const Vec& x) const { return grad_(x); }
  int dims() const { return dims_; }
  bool is_harmonic() const { return omega_.has_value(); }
  /// Frequencies of a harmonic potential; empty for custom potentials.
  const std::optional<Vec>& omega() const { return omega_; }

 private:
  Potential(int dims, Scalar v, Gradient g, std::optional<Vec> omega)
      : dims_(dims), value_(std::move(v)), grad_(std::move(g)), omega_(omega) {}

  int dims_;
  Scalar value_;
  Gradient grad_;
  std::optional<Vec> omega_;
};

struct PhaseSample {
  double t = 0.0;
  Vec x{};
  Vec xdot{};
};

/// Classical path x(t), xdot(t) of the Newton law xddot = -grad V(x).
struct NewtonTrajectory {
  int dims = 0;
  std::vector<PhaseSample> samples;
  double hamiltonian0 = 0.0;

  /// Linear interpolation between samples; clamps outside the sampled range.
  PhaseSample at(double t) const;
};

/// H = |xdot|^2 / 2 + V(x).
double hamiltonian(const Vec& x, const Vec& xdot, const Potential& potential);

/// Velocity-Verlet integration over [0, t_final] with step h; the last step
/// is shortened to land on t_final. Negative h integrates backwards in time.
NewtonTrajectory solve_newton(const Vec& x0, const Vec& xi0, const Potential& potential,
                              double t_final, double h);

/// Closed-form solution for V = sum omega_d^2 x_d^2:
/// x_d(t) = x0_d cos(w t) + xi0_d / w sin(w t), w = sqrt(2) omega_d.
PhaseSample harmonic_analytic(const Vec& x0, const Vec& xi0, const Vec& omega, int dims, double t);

/// Writes t,x_1..x_N,xdot_1..xdot_N rows with 17 significant digits.
void write_trajectory_csv(const NewtonTrajectory& trajectory, std::ostream& out);

}  // namespace nls
