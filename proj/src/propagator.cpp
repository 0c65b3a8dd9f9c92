#include "nls/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nls/error.hpp"

namespace nls {

namespace {

std::vector<Complex> kinetic_multiplier(double step_k, const LaplacianSymbol& symbol) {
  std::vector<Complex> m(symbol.values.size());
  // Laplacian symbol is -|kappa|^2.
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::polar(1.0, 0.25 * step_k * symbol.values[i]);
  return m;
}

void multiply(SpectralField& hat, const std::vector<Complex>& m) {
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= m[i];
}

void check_finite(const SpectralField& f, double t) {
  for (const auto& v : f.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "propagation produced nonfinite values at t = " << t;
      throw NumericError(msg.str());
    }
  }
}

std::size_t nearest_index(const GridSpec& g, const Vec& X) {
  std::size_t flat = 0;
  for (int d = 0; d < kMaxDims; ++d) {
    std::size_t i = 0;
    if (d < g.dims) {
      const double pos = (X[d] + g.half_width[d]) / g.spacing(d);
      const auto n = static_cast<long>(g.points[d]);
      long r = std::lround(pos) % n;
      if (r < 0) r += n;
      i = static_cast<std::size_t>(r);
    }
    flat = flat * g.points[d] + i;
  }
  return flat;
}

}  // namespace

void PropagatorConfig::validate() const {
  if (!(step_k > 0.0) || !std::isfinite(step_k)) throw ConfigError("propagator: step_k must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("propagator: t_final must be >= 0");
  if (frame_stride < 1) throw ConfigError("propagator: frame_stride must be >= 1");
}

SpectralField place_profile(const GroundStateResult& profile, const GridSpec& grid,
                            const PhysicalParams& params, const Vec& x,
                            const FourierTransform& fft) {
  const double root_eps = std::sqrt(params.epsilon);
  Vec shift{};
  for (int d = 0; d < grid.dims; ++d) {
    shift[d] = x[d] / root_eps;
    if (shift[d] < -grid.half_width[d] || shift[d] >= grid.half_width[d]) {
      std::ostringstream msg;
      msg << "bump center x_" << d + 1 << " = " << x[d] << " maps to X = " << shift[d]
          << ", outside the domain [" << -grid.half_width[d] << ", " << grid.half_width[d] << ")";
      throw ConfigError(msg.str());
    }
  }
  SpectralField embedded = profile.profile.grid == grid ? profile.profile
                                                         : embed_centered(profile.profile, grid);
  return translate(embedded, shift, fft);
}

SpectralField initial_datum(const GridSpec& grid, const PhysicalParams& params,
                            std::span<const Bump> bumps, std::vector<std::string>* warnings) {
  params.validate();
  if (bumps.empty() || bumps.size() > 2) throw ConfigError("initial datum needs one or two bumps");
  if (grid.dims != params.dims) throw ConfigError("initial datum: grid and params dims differ");
  const FourierTransform fft(grid);
  const double root_eps = std::sqrt(params.epsilon);

  SpectralField out(grid, Space::real);
  std::vector<SpectralField> placed;
  for (const Bump& b : bumps) {
    if (!b.profile) throw ConfigError("bump has no ground-state profile");
    const PhysicalParams& pp = b.profile->params;
    if (pp.dims != params.dims || pp.epsilon != params.epsilon || pp.p != params.p ||
        pp.mass != b.mass) {
      throw ConfigError("bump profile was solved with different (eps, p, N, m)");
    }
    SpectralField bump = place_profile(*b.profile, grid, params, b.center, fft);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Vec X = position(grid, i);
      double phase = 0.0;
      for (int d = 0; d < grid.dims; ++d) phase += X[d] * b.velocity[d];
      out[i] += bump[i].real() * std::polar(1.0, phase / root_eps);
    }
    placed.push_back(std::move(bump));
  }

  if (bumps.size() == 2 && warnings != nullptr) {
    Vec mid{};
    for (int d = 0; d < grid.dims; ++d) {
      mid[d] = 0.5 * (bumps[0].center[d] + bumps[1].center[d]) / root_eps;
    }
    const std::size_t at = nearest_index(grid, mid);
    for (std::size_t b = 0; b < placed.size(); ++b) {
      double peak = 0.0;
      for (const auto& v : placed[b].values) peak = std::max(peak, std::abs(v));
      const double tail = std::abs(placed[b][at]);
      if (tail > 1e-3 * peak) {
        std::ostringstream msg;
        msg << "bump " << b + 1 << " tail at the midpoint is " << tail / peak
            << " of its peak; the bumps overlap";
        warnings->push_back(msg.str());
      }
    }
  }
  return out;
}

SpectralField kinetic_half_step(SpectralField field_hat, double step_k,
                                const LaplacianSymbol& symbol) {
  if (field_hat.space != Space::fourier) throw ConfigError("kinetic_half_step: Fourier-space field required");
  multiply(field_hat, kinetic_multiplier(step_k, symbol));
  return field_hat;
}

std::vector<double> scaled_potential(const GridSpec& grid, const Potential& potential,
                                     const PhysicalParams& params) {
  if (potential.dims() != grid.dims) throw ConfigError("potential and grid dims differ");
  const double root_eps = std::sqrt(params.epsilon);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Vec x = position(grid, i);
    for (int d = 0; d < grid.dims; ++d) x[d] *= root_eps;
    v[i] = potential.value(x) / params.epsilon;
  }
  return v;
}

SpectralField potential_nonlinear_step(SpectralField field, double step_k,
                                       std::span<const double> scaled_v,
                                       const PhysicalParams& params) {
  if (field.space != Space::real) throw ConfigError("potential_nonlinear_step: real-space field required");
  const double coupling = std::pow(params.epsilon, -0.5 * (2.0 + params.dims * params.p));
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double a2 = std::norm(field[i]);
    const double nl = a2 > 0.0 ? coupling * std::pow(a2, params.p) : 0.0;
    field[i] *= std::polar(1.0, -step_k * (scaled_v[i] - nl));
  }
  return field;
}

SpectralField strang_step(const SpectralField& field, double step_k,
                          std::span<const double> scaled_v, const PhysicalParams& params,
                          const SpectralContext& ctx) {
  const auto half = kinetic_multiplier(step_k, ctx.laplacian);
  SpectralField hat = ctx.fft.forward(field);
  multiply(hat, half);
  SpectralField mid = potential_nonlinear_step(ctx.fft.inverse(std::move(hat)), step_k, scaled_v,
                                               params);
  hat = ctx.fft.forward(std::move(mid));
  multiply(hat, half);
  SpectralField out = ctx.fft.inverse(std::move(hat));
  check_finite(out, step_k);
  return out;
}

SpectralField propagate(SpectralField field0, const Potential& potential,
                        const PhysicalParams& params, const PropagatorConfig& config,
                        std::span<const Observer> observers, const SpectralContext& ctx) {
  params.validate();
  config.validate();
  if (field0.space != Space::real) throw ConfigError("propagate: real-space field required");
  if (field0.grid != ctx.grid) throw ConfigError("propagate: field grid differs from the context");

  auto emit = [&](double t, std::size_t step, const SpectralField& f) {
    for (const auto& obs : observers) {
      try {
        obs(Frame{t, step, f});
      } catch (const IoError& e) {
        std::ostringstream msg;
        msg << "observer failed at t = " << t << ": " << e.what();
        throw IoError(msg.str());
      }
    }
  };

  emit(0.0, 0, field0);
  const double k = config.step_k;
  const auto steps = static_cast<std::size_t>(std::ceil(config.t_final / k - 1e-9));
  if (steps == 0) return field0;

  const auto v = scaled_potential(ctx.grid, potential, params);
  auto time_at = [&](std::size_t s) {
    return s >= steps ? config.t_final : static_cast<double>(s) * k;
  };
  auto length_of = [&](std::size_t s) { return time_at(s) - time_at(s - 1); };

  // Multipliers for the regular and the shortened final step.
  const auto half_regular = kinetic_multiplier(k, ctx.laplacian);
  const auto full_regular = kinetic_multiplier(2.0 * k, ctx.laplacian);
  auto half_for = [&](double len) {
    return len == k ? half_regular : kinetic_multiplier(len, ctx.laplacian);
  };

  SpectralField hat = ctx.fft.forward(std::move(field0));
  multiply(hat, half_for(length_of(1)));
  SpectralField real;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double len = length_of(s);
    real = potential_nonlinear_step(ctx.fft.inverse(std::move(hat)), len, v, params);
    hat = ctx.fft.forward(std::move(real));

    const bool frame = s % config.frame_stride == 0 || s == steps;
    const double next_len = s < steps ? length_of(s + 1) : 0.0;
    if (!frame && next_len == len && len == k) {
      multiply(hat, full_regular);
      continue;
    }
    multiply(hat, half_for(len));
    if (frame) {
      SpectralField out = ctx.fft.inverse(hat);
      check_finite(out, time_at(s));
      emit(time_at(s), s, out);
      if (s == steps) return out;
    }
    multiply(hat, half_for(next_len));
  }
  return ctx.fft.inverse(std::move(hat));
}

}  // namespace nls
