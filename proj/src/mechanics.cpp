#include "nls/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "nls/error.hpp"

namespace nls {

Potential Potential::harmonic(int dims, const Vec& omega) {
  if (dims < 1 || dims > kMaxDims) throw ConfigError("potential: dims must be 1, 2 or 3");
  for (int d = 0; d < dims; ++d) {
    if (!(omega[d] > 0.0)) throw ConfigError("potential: harmonic frequencies must be positive");
  }
  auto value = [omega, dims](const Vec& x) {
    double v = 0.0;
    for (int d = 0; d < dims; ++d) v += omega[d] * omega[d] * x[d] * x[d];
    return v;
  };
  auto grad = [omega, dims](const Vec& x) {
    Vec g{};
    for (int d = 0; d < dims; ++d) g[d] = 2.0 * omega[d] * omega[d] * x[d];
    return g;
  };
  return Potential(dims, value, grad, omega);
}

Potential Potential::custom(int dims, Scalar value, Gradient grad) {
  if (dims < 1 || dims > kMaxDims) throw ConfigError("potential: dims must be 1, 2 or 3");
  if (!value || !grad) throw ConfigError("potential: value and gradient callables required");
  return Potential(dims, std::move(value), std::move(grad), std::nullopt);
}

double hamiltonian(const Vec& x, const Vec& xdot, const Potential& potential) {
  double kinetic = 0.0;
  for (int d = 0; d < potential.dims(); ++d) kinetic += xdot[d] * xdot[d];
  return 0.5 * kinetic + potential.value(x);
}

PhaseSample NewtonTrajectory::at(double t) const {
  if (samples.empty()) throw NumericError("empty trajectory");
  const bool forward = samples.size() < 2 || samples.back().t >= samples.front().t;
  auto before = [forward](const PhaseSample& s, double tt) { return forward ? s.t < tt : s.t > tt; };
  auto it = std::lower_bound(samples.begin(), samples.end(), t, before);
  if (it == samples.begin()) return samples.front();
  if (it == samples.end()) return samples.back();
  const PhaseSample& b = *it;
  const PhaseSample& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  PhaseSample s{t, {}, {}};
  for (int d = 0; d < kMaxDims; ++d) {
    s.x[d] = a.x[d] + w * (b.x[d] - a.x[d]);
    s.xdot[d] = a.xdot[d] + w * (b.xdot[d] - a.xdot[d]);
  }
  return s;
}

NewtonTrajectory solve_newton(const Vec& x0, const Vec& xi0, const Potential& potential,
                              double t_final, double h) {
  if (h == 0.0 || !std::isfinite(h)) throw ConfigError("solve_newton: step must be nonzero");
  if (!std::isfinite(t_final) || t_final * h < 0.0) {
    throw ConfigError("solve_newton: t_final and h must have the same sign");
  }
  const int n = potential.dims();
  NewtonTrajectory traj;
  traj.dims = n;
  traj.hamiltonian0 = hamiltonian(x0, xi0, potential);

  Vec x = x0;
  Vec v = xi0;
  Vec acc = potential.gradient(x);
  for (int d = 0; d < n; ++d) acc[d] = -acc[d];
  traj.samples.push_back({0.0, x, v});

  const auto steps = static_cast<std::size_t>(std::ceil(t_final / h - 1e-9));
  traj.samples.reserve(steps + 1);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * h;
    const double t_next = s == steps ? t_final : static_cast<double>(s) * h;
    const double dt = t_next - t_prev;
    for (int d = 0; d < n; ++d) {
      v[d] += 0.5 * dt * acc[d];
      x[d] += dt * v[d];
    }
    acc = potential.gradient(x);
    for (int d = 0; d < n; ++d) {
      acc[d] = -acc[d];
      v[d] += 0.5 * dt * acc[d];
    }
    for (int d = 0; d < n; ++d) {
      if (!std::isfinite(x[d]) || !std::isfinite(v[d])) {
        throw NumericError("solve_newton: nonfinite state at t = " + std::to_string(t_next));
      }
    }
    traj.samples.push_back({t_next, x, v});
  }
  return traj;
}

PhaseSample harmonic_analytic(const Vec& x0, const Vec& xi0, const Vec& omega, int dims,
                              double t) {
  PhaseSample s{t, {}, {}};
  for (int d = 0; d < dims; ++d) {
    const double w = std::sqrt(2.0) * omega[d];
    const double c = std::cos(w * t);
    const double sn = std::sin(w * t);
    s.x[d] = x0[d] * c + xi0[d] / w * sn;
    s.xdot[d] = -x0[d] * w * sn + xi0[d] * c;
  }
  return s;
}

void write_trajectory_csv(const NewtonTrajectory& trajectory, std::ostream& out) {
  out << "t";
  for (int d = 1; d <= trajectory.dims; ++d) out << ",x_" << d;
  for (int d = 1; d <= trajectory.dims; ++d) out << ",xdot_" << d;
  out << '\n' << std::setprecision(17);
  for (const auto& s : trajectory.samples) {
    out << s.t;
    for (int d = 0; d < trajectory.dims; ++d) out << ',' << s.x[d];
    for (int d = 0; d < trajectory.dims; ++d) out << ',' << s.xdot[d];
    out << '\n';
  }
}

}  // namespace nls
