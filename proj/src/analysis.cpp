#include "nls/analysis.hpp"

#include <cmath>
#include <sstream>

#include "nls/error.hpp"
#include "sum.hpp"

namespace nls {

double h_eps_norm(const SpectralField& field, const PhysicalParams& params,
                  const SpectralContext& ctx) {
  if (field.space != Space::real) throw ConfigError("h_eps_norm: real-space field required");
  const double grad = gradient_norm_squared(ctx.fft.forward(field), ctx.laplacian);
  const double l2 = mass(field);
  const int n = params.dims;
  return std::sqrt(std::pow(params.epsilon, 1 - n) * grad + std::pow(params.epsilon, -n) * l2);
}

double soliton_error(const SpectralField& field, std::span<const SolitonReference> refs,
                     const PhysicalParams& params, const SpectralContext& ctx) {
  const GridSpec& g = ctx.grid;
  const double root_eps = std::sqrt(params.epsilon);
  SpectralField diff(g, Space::real);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(field[i]);
  for (const auto& ref : refs) {
    if (ref.profile == nullptr || ref.profile->grid != g) {
      throw ConfigError("soliton_error: profile must live on the propagation grid");
    }
    Vec shift{};
    for (int d = 0; d < g.dims; ++d) {
      shift[d] = ref.newton_x[d] / root_eps;
      if (shift[d] < -g.half_width[d] || shift[d] >= g.half_width[d]) {
        std::ostringstream msg;
        msg << "soliton_error: Newton position x_" << d + 1 << " = " << ref.newton_x[d]
            << " is outside the grid";
        throw ConfigError(msg.str());
      }
    }
    const SpectralField placed = translate(*ref.profile, shift, ctx.fft);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= placed[i].real();
  }
  return h_eps_norm(diff, params, ctx);
}

double soliton_error(const SpectralField& field, const SpectralField& profile, const Vec& newton_x,
                     const PhysicalParams& params, const SpectralContext& ctx) {
  const SolitonReference ref{&profile, newton_x};
  return soliton_error(field, std::span(&ref, 1), params, ctx);
}

Vec center_of_mass(const SpectralField& field, const std::function<bool(const Vec&)>& mask) {
  const GridSpec& g = field.grid;
  detail::CompensatedSum total;
  std::array<detail::CompensatedSum, kMaxDims> moment;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Vec X = position(g, i);
    if (mask && !mask(X)) continue;
    const double w = std::norm(field[i]);
    total.add(w);
    for (int d = 0; d < g.dims; ++d) moment[d].add(w * X[d]);
  }
  if (!(total.value() > 0.0)) throw NumericError("center_of_mass: zero mass");
  Vec c{};
  for (int d = 0; d < g.dims; ++d) c[d] = moment[d].value() / total.value();
  return c;
}

double full_energy(const SpectralField& field, std::span<const double> scaled_v,
                   const PhysicalParams& params, const SpectralContext& ctx) {
  if (field.space != Space::real) throw ConfigError("full_energy: real-space field required");
  const double grad = gradient_norm_squared(ctx.fft.forward(field), ctx.laplacian);
  detail::CompensatedSum pot;
  detail::CompensatedSum pw;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double a2 = std::norm(field[i]);
    pot.add(scaled_v[i] * a2);
    pw.add(std::pow(a2, params.p + 1.0));
  }
  const double h = ctx.grid.cell_volume();
  const double coupling = std::pow(params.epsilon, -0.5 * (2.0 + params.dims * params.p));
  return 0.5 * grad + pot.value() * h - coupling / (params.p + 1.0) * pw.value() * h;
}

}  // namespace nls
