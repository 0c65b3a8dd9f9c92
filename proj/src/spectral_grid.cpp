#include "nls/spectral_grid.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <string>

#include "nls/error.hpp"
#include "sum.hpp"

namespace nls {

namespace {

// The FFTW planner is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_space(const SpectralField& f, Space expected, const char* what) {
  if (f.space != expected) {
    throw ConfigError(std::string(what) + ": field is in the wrong space");
  }
}

}  // namespace

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dims; ++d) v *= spacing(d);
  return v;
}

long GridSpec::signed_mode(std::size_t i, std::size_t n) {
  const auto si = static_cast<long>(i);
  const auto sn = static_cast<long>(n);
  return si < sn / 2 ? si : si - sn;
}

double GridSpec::wavenumber(int d, std::size_t i) const {
  if (d >= dims) return 0.0;
  return std::numbers::pi * static_cast<double>(signed_mode(i, points[d])) / half_width[d];
}

GridSpec make_grid(int dims, std::span<const double> half_widths,
                   std::span<const std::size_t> points) {
  if (dims < 1 || dims > kMaxDims) {
    throw ConfigError("grid dims must be 1, 2 or 3 (got " + std::to_string(dims) + ")");
  }
  if (half_widths.size() != static_cast<std::size_t>(dims) ||
      points.size() != static_cast<std::size_t>(dims)) {
    throw ConfigError("grid: half_widths and points must have one entry per dimension");
  }
  GridSpec g;
  g.dims = dims;
  for (int d = 0; d < dims; ++d) {
    if (!(half_widths[d] > 0.0) || !std::isfinite(half_widths[d])) {
      throw ConfigError("grid: half_width must be positive and finite");
    }
    if (points[d] < 4 || !std::has_single_bit(points[d])) {
      throw ConfigError("grid: points must be a power of two >= 4 (got " +
                        std::to_string(points[d]) + ")");
    }
    g.half_width[d] = half_widths[d];
    g.points[d] = points[d];
  }
  return g;
}

GridSpec sub_grid(const GridSpec& grid, std::span<const std::size_t> points) {
  if (points.size() != static_cast<std::size_t>(grid.dims)) {
    throw ConfigError("sub_grid: one point count per dimension required");
  }
  std::array<double, kMaxDims> widths{};
  for (int d = 0; d < grid.dims; ++d) {
    if (points[d] > grid.points[d]) {
      throw ConfigError("sub_grid: sub-grid cannot be larger than the grid");
    }
    widths[d] = grid.spacing(d) * static_cast<double>(points[d]) / 2.0;
  }
  return make_grid(grid.dims, std::span(widths.data(), grid.dims), points);
}

LaplacianSymbol laplacian_symbol(const GridSpec& grid) {
  LaplacianSymbol s{grid, std::vector<double>(grid.size())};
  std::array<std::vector<double>, kMaxDims> k2;
  for (int d = 0; d < kMaxDims; ++d) {
    k2[d].resize(grid.points[d]);
    for (std::size_t i = 0; i < grid.points[d]; ++i) {
      const double k = grid.wavenumber(d, i);
      k2[d][i] = k * k;
    }
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < grid.points[0]; ++i)
    for (std::size_t j = 0; j < grid.points[1]; ++j)
      for (std::size_t l = 0; l < grid.points[2]; ++l)
        s.values[flat++] = -(k2[0][i] + k2[1][j] + k2[2][l]);
  return s;
}

int transform_threads() {
  static const int n = [] {
    const char* env = std::getenv("NLS_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
  }();
  return n;
}

struct FourierTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

FourierTransform::FourierTransform(const GridSpec& grid)
    : grid_(grid), plans_(std::make_unique<Plans>()) {
  std::array<int, kMaxDims> n{};
  for (int d = 0; d < grid.dims; ++d) n[d] = static_cast<int>(grid.points[d]);
  ComplexBuffer scratch(grid.size());
  auto* data = reinterpret_cast<fftw_complex*>(scratch.data());

  std::lock_guard lock(planner_mutex());
  static const bool threads_ready = fftw_init_threads() != 0;
  if (threads_ready) fftw_plan_with_nthreads(transform_threads());
  plans_->forward = fftw_plan_dft(grid.dims, n.data(), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft(grid.dims, n.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward) {
    throw NumericError("FFTW failed to create a plan");
  }
}

FourierTransform::~FourierTransform() = default;
FourierTransform::FourierTransform(FourierTransform&&) noexcept = default;
FourierTransform& FourierTransform::operator=(FourierTransform&&) noexcept = default;

SpectralField FourierTransform::forward(SpectralField field) const {
  check_space(field, Space::real, "forward transform");
  if (field.grid != grid_) throw ConfigError("forward transform: grid mismatch");
  auto* data = reinterpret_cast<fftw_complex*>(field.values.data());
  fftw_execute_dft(plans_->forward, data, data);
  field.space = Space::fourier;
  return field;
}

SpectralField FourierTransform::inverse(SpectralField field) const {
  check_space(field, Space::fourier, "inverse transform");
  if (field.grid != grid_) throw ConfigError("inverse transform: grid mismatch");
  auto* data = reinterpret_cast<fftw_complex*>(field.values.data());
  fftw_execute_dft(plans_->backward, data, data);
  const double scale = 1.0 / static_cast<double>(field.size());
  for (auto& v : field.values) v *= scale;
  field.space = Space::real;
  return field;
}

double quadrature(const GridSpec& grid, std::span<const double> values) {
  detail::CompensatedSum sum;
  for (double v : values) sum.add(v);
  return sum.value() * grid.cell_volume();
}

double mass(const SpectralField& field) {
  detail::CompensatedSum sum;
  for (const auto& v : field.values) sum.add(std::norm(v));
  double weight = field.grid.cell_volume();
  if (field.space == Space::fourier) weight /= static_cast<double>(field.size());
  return sum.value() * weight;
}

double gradient_norm_squared(const SpectralField& field_hat, const LaplacianSymbol& symbol) {
  check_space(field_hat, Space::fourier, "gradient_norm_squared");
  detail::CompensatedSum sum;
  for (std::size_t i = 0; i < field_hat.size(); ++i) {
    sum.add(-symbol.values[i] * std::norm(field_hat[i]));
  }
  return sum.value() * field_hat.grid.cell_volume() / static_cast<double>(field_hat.size());
}

SpectralField apply_laplacian(SpectralField field_hat, const LaplacianSymbol& symbol) {
  check_space(field_hat, Space::fourier, "apply_laplacian");
  for (std::size_t i = 0; i < field_hat.size(); ++i) field_hat[i] *= symbol.values[i];
  return field_hat;
}

SpectralField translate(const SpectralField& field, const Vec& shift,
                        const FourierTransform& fft) {
  const GridSpec& g = field.grid;
  std::array<std::vector<Complex>, kMaxDims> ramp;
  for (int d = 0; d < kMaxDims; ++d) {
    ramp[d].assign(g.points[d], Complex{1.0, 0.0});
    if (d >= g.dims) continue;
    const std::size_t n = g.points[d];
    for (std::size_t i = 0; i < n; ++i) {
      const double arg = g.wavenumber(d, i) * shift[d];
      ramp[d][i] = (i == n / 2) ? Complex{std::cos(arg), 0.0} : std::polar(1.0, -arg);
    }
  }
  SpectralField hat = fft.forward(field);
  std::size_t flat = 0;
  for (std::size_t i = 0; i < g.points[0]; ++i)
    for (std::size_t j = 0; j < g.points[1]; ++j) {
      const Complex ij = ramp[0][i] * ramp[1][j];
      for (std::size_t l = 0; l < g.points[2]; ++l) hat[flat++] *= ij * ramp[2][l];
    }
  return fft.inverse(std::move(hat));
}

SpectralField embed_centered(const SpectralField& field, const GridSpec& target) {
  if (field.space != Space::real) throw ConfigError("embed_centered: real-space field required");
  const GridSpec& src = field.grid;
  if (src.dims != target.dims) throw ConfigError("embed_centered: dimension mismatch");
  std::array<std::size_t, kMaxDims> offset{};
  for (int d = 0; d < src.dims; ++d) {
    if (src.points[d] > target.points[d] ||
        std::abs(src.spacing(d) - target.spacing(d)) > 1e-12 * target.spacing(d)) {
      throw ConfigError("embed_centered: profile grid must be a centered sub-grid of the target");
    }
    offset[d] = (target.points[d] - src.points[d]) / 2;
  }
  SpectralField out(target, Space::real);
  std::size_t flat = 0;
  for (std::size_t i = 0; i < src.points[0]; ++i)
    for (std::size_t j = 0; j < src.points[1]; ++j)
      for (std::size_t l = 0; l < src.points[2]; ++l) {
        const std::size_t t =
            ((i + offset[0]) * target.points[1] + (j + offset[1])) * target.points[2] +
            (l + offset[2]);
        out[t] = field[flat++];
      }
  return out;
}

std::array<std::size_t, kMaxDims> unravel(const GridSpec& grid, std::size_t flat) {
  std::array<std::size_t, kMaxDims> idx{};
  idx[2] = flat % grid.points[2];
  flat /= grid.points[2];
  idx[1] = flat % grid.points[1];
  idx[0] = flat / grid.points[1];
  return idx;
}

std::size_t mirror_index(const GridSpec& grid, std::size_t flat) {
  auto idx = unravel(grid, flat);
  for (int d = 0; d < kMaxDims; ++d) {
    idx[d] = (grid.points[d] - idx[d]) % grid.points[d];
  }
  return (idx[0] * grid.points[1] + idx[1]) * grid.points[2] + idx[2];
}

Vec position(const GridSpec& grid, std::size_t flat) {
  const auto idx = unravel(grid, flat);
  Vec x{};
  for (int d = 0; d < grid.dims; ++d) x[d] = grid.coordinate(d, idx[d]);
  return x;
}

}  // namespace nls
