#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nls/ground_state.hpp"
#include "nls/mechanics.hpp"
#include "nls/spectral_grid.hpp"

namespace nls {

/// One soliton of the initial datum: mass, physical position and velocity,
/// and the ground state it is built from.
struct Bump {
  double mass = 1.0;
  Vec center{};
  Vec velocity{};
  std::shared_ptr<const GroundStateResult> profile;
};

struct PropagatorConfig {
  double step_k = 1e-3;
  double t_final = 1.0;
  std::size_t frame_stride = 1;

  void validate() const;
};

/// Sum over bumps of R_i(X - X_i) exp(i X . xi_i / sqrt(eps)) with X_i = x_i / sqrt(eps).
///
/// Profiles may live on a centered sub-grid with the grid's spacing; they are
/// embedded and translated spectrally. Overlapping two-bump data produce a
/// message in `warnings` when the tails at the midpoint exceed 1e-3 of the peak.
SpectralField initial_datum(const GridSpec& grid, const PhysicalParams& params,
                            std::span<const Bump> bumps,
                            std::vector<std::string>* warnings = nullptr);

/// Embeds a ground-state profile into `grid` and translates it to the physical point x.
SpectralField place_profile(const GroundStateResult& profile, const GridSpec& grid,
                            const PhysicalParams& params, const Vec& x,
                            const FourierTransform& fft);

/// Free evolution over k/2: each mode times exp(-i (k/2) |kappa|^2 / 2).
SpectralField kinetic_half_step(SpectralField field_hat, double step_k,
                                const LaplacianSymbol& symbol);

/// V(sqrt(eps) X) / eps sampled on the grid.
std::vector<double> scaled_potential(const GridSpec& grid, const Potential& potential,
                                     const PhysicalParams& params);

/// Exact flow of i Phi_t = (V/eps - eps^(-(2+Np)/2) |Phi|^(2p)) Phi over time k.
SpectralField potential_nonlinear_step(SpectralField field, double step_k,
                                       std::span<const double> scaled_v,
                                       const PhysicalParams& params);

/// Half kinetic, full potential/nonlinear, half kinetic. Real space in and out.
SpectralField strang_step(const SpectralField& field, double step_k,
                          std::span<const double> scaled_v, const PhysicalParams& params,
                          const SpectralContext& ctx);

struct Frame {
  double t = 0.0;
  std::size_t step = 0;
  const SpectralField& field;
};
using Observer = std::function<void(const Frame&)>;

/// Advances field0 from t = 0 to t_final in steps of step_k (the last one
/// shortened). Observers see t = 0, every frame_stride-th step and the final
/// state. Consecutive kinetic half steps are fused between frames.
SpectralField propagate(SpectralField field0, const Potential& potential,
                        const PhysicalParams& params, const PropagatorConfig& config,
                        std::span<const Observer> observers, const SpectralContext& ctx);

}  // namespace nls
