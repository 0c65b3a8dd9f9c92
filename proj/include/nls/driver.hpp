#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nls/analysis.hpp"
#include "nls/io.hpp"
#include "nls/propagator.hpp"

namespace nls {

/// A configured evolve run: ground states, initial datum and Newton references.
class Simulation {
 public:
  /// Solves one ground state per distinct bump mass on the profile sub-grid,
  /// unless `profile` is given, in which case every bump uses it.
  explicit Simulation(const RunConfig& config,
                      std::shared_ptr<const GroundStateResult> profile = nullptr);

  const RunConfig& config() const { return config_; }
  const SpectralContext& context() const { return *ctx_; }
  const Potential& potential() const { return potential_; }
  std::span<const Bump> bumps() const { return bumps_; }
  const SpectralField& initial() const { return initial_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  /// Ground state of bump i embedded in the propagation grid, centered at 0.
  const SpectralField& embedded_profile(std::size_t i) const { return embedded_[i]; }

  /// Physical Newton position of bump i at time t.
  Vec newton_position(std::size_t i, double t) const;
  /// Newton path of bump i sampled every newton_step over [0, t_final].
  NewtonTrajectory newton_trajectory(std::size_t i) const;

  DiagnosticsRow diagnostics(const Frame& frame) const;

  /// Propagates to t_final. Diagnostics are taken at every emitted frame,
  /// after which the extra observers run.
  DiagnosticsSeries run(std::span<const Observer> extra = {}) const;

 private:
  RunConfig config_;
  std::unique_ptr<SpectralContext> ctx_;
  Potential potential_;
  std::vector<Bump> bumps_;
  std::vector<SpectralField> embedded_;
  std::vector<NewtonTrajectory> paths_;  // only for non-harmonic potentials
  std::vector<double> scaled_v_;
  SpectralField initial_;
  std::vector<std::string> warnings_;
};

/// Builds a ground-state result from a stored profile frame.
std::shared_ptr<const GroundStateResult> load_profile(const std::filesystem::path& path, int dims);

void run_groundstate(const RunConfig& config, std::ostream& log);
void run_evolve(const RunConfig& config, const std::filesystem::path& profile_path, std::ostream& log);
void run_newton(const RunConfig& config, std::ostream& log);

struct SweepPoint {
  double epsilon = 0.0;
  double max_error = 0.0;
  double max_error_over_eps = 0.0;
};
std::vector<SweepPoint> run_error_sweep(const RunConfig& config, std::ostream& log);

enum ExitCode : int { kOk = 0, kUnexpected = 1, kConfigFailure = 2, kNumericFailure = 3, kIoFailure = 4 };

int cli_main(int argc, char** argv);

}  // namespace nls
