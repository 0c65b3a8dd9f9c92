#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nls/ground_state.hpp"
#include "nls/mechanics.hpp"
#include "nls/spectral_grid.hpp"

namespace nls {

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double energy_full = 0.0;
  double h_eps_error = 0.0;
  Vec com{};       ///< physical coordinates, sqrt(eps) * scaled center of mass
  Vec newton_x{};  ///< Newton position of the first bump
};

struct DiagnosticsSeries {
  PhysicalParams params;
  std::vector<DiagnosticsRow> rows;
};

/// H_eps norm written in scaled variables U(X) = eps^(N/4) u(sqrt(eps) X):
/// sqrt(eps^(1-N) ||grad_X U||^2 + eps^(-N) ||U||^2). For N = 2 this is
/// sqrt(eps^-1 ||grad U||^2 + eps^-2 ||U||^2).
double h_eps_norm(const SpectralField& field, const PhysicalParams& params,
                  const SpectralContext& ctx);

/// A ground-state profile on the propagation grid (centered at X = 0) and the
/// physical Newton position its soliton should occupy.
struct SolitonReference {
  const SpectralField* profile = nullptr;
  Vec newton_x{};
};

/// H_eps norm of |Phi| - sum_i R_i(X - x_i / sqrt(eps)). Only moduli are compared.
/// Throws ConfigError when a Newton position leaves the grid.
double soliton_error(const SpectralField& field, std::span<const SolitonReference> refs,
                     const PhysicalParams& params, const SpectralContext& ctx);

/// Single-bump convenience overload.
double soliton_error(const SpectralField& field, const SpectralField& profile, const Vec& newton_x,
                     const PhysicalParams& params, const SpectralContext& ctx);

/// int X |Phi|^2 / int |Phi|^2 in scaled coordinates, optionally restricted to
/// the grid points where `mask(X)` is true. Throws NumericError on zero mass.
Vec center_of_mass(const SpectralField& field,
                   const std::function<bool(const Vec&)>& mask = {});

/// (1/2) int |grad Phi|^2 + int V(sqrt(eps) X)/eps |Phi|^2
///   - eps^(-(2+Np)/2) / (p+1) int |Phi|^(2p+2), conserved by the NLS flow.
double full_energy(const SpectralField& field, std::span<const double> scaled_v,
                   const PhysicalParams& params, const SpectralContext& ctx);

}  // namespace nls
