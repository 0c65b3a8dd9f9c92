#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nls/analysis.hpp"
#include "nls/ground_state.hpp"
#include "nls/propagator.hpp"
#include "nls/spectral_grid.hpp"

namespace nls {

enum class Mode { groundstate, evolve, newton, error_sweep };

std::optional<Mode> mode_from_string(std::string_view name);
std::string_view to_string(Mode mode);

struct BumpSpec {
  double mass = 1.0;
  Vec center{};
  Vec velocity{};
};

struct PotentialSpec {
  std::string kind = "harmonic";
  Vec omega{1.0, 1.0, 1.0};
};

/// Fully validated run description built from a configuration file.
struct RunConfig {
  Mode mode = Mode::evolve;
  PhysicalParams params;
  GridSpec grid;
  /// Ground states are solved on the centered sub-grid with these point counts.
  std::array<std::size_t, kMaxDims> profile_points{1, 1, 1};
  PotentialSpec potential;
  std::vector<BumpSpec> bumps;
  FlowConfig flow;
  PropagatorConfig propagator;
  /// Velocity-Verlet step for non-harmonic trajectories; defaults to step_k.
  double newton_step = 0.0;
  std::filesystem::path output_dir;
  bool write_frames = true;
  std::vector<double> sweep_epsilons;

  GridSpec profile_grid() const;
  Potential make_potential() const;
};

/// One "section.key=value" override, e.g. {"params.epsilon", "0.02"}.
using ConfigOverride = std::pair<std::string, std::string>;

/// Parses the sectioned key = value format. The mode comes from `mode_override`
/// when given, otherwise from a top-level `mode = ...` line. All problems are
/// collected and reported together in one ConfigError.
RunConfig parse_config(std::string_view text, std::optional<Mode> mode_override = std::nullopt,
                       const std::vector<ConfigOverride>& overrides = {});

inline constexpr std::array<char, 4> kFrameMagic{'N', 'L', 'S', 'F'};
inline constexpr std::uint32_t kFrameVersion = 1;

struct FrameMeta {
  double epsilon = 0.0;
  double p = 0.0;
  double mass = 0.0;
};

struct FrameData {
  SpectralField field;
  double t = 0.0;
  FrameMeta meta;
};

/// Little-endian byte image of a frame: magic, version, dims, point counts,
/// half widths, eps, p, mass, t, then interleaved (re, im) doubles.
std::string encode_frame(const SpectralField& field, double t, const FrameMeta& meta);
FrameData decode_frame(std::string_view bytes);

void write_frame(const SpectralField& field, double t, const FrameMeta& meta,
                 const std::filesystem::path& path);
FrameData read_frame(const std::filesystem::path& path);

void write_diagnostics(const DiagnosticsSeries& series, std::ostream& out);
void write_diagnostics(const DiagnosticsSeries& series, const std::filesystem::path& path);

}  // namespace nls
