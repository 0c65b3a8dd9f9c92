#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace nls {

inline constexpr int kMaxDims = 3;

using Vec = std::array<double, kMaxDims>;
using Complex = std::complex<double>;

/// Periodic tensor grid on [-L_d, L_d) with n_d points per axis.
///
/// Points are stored row-major (last axis fastest). Axes beyond `dims` are
/// unused and hold n = 1 so that strides and sizes stay uniform.
struct GridSpec {
  int dims = 1;
  Vec half_width{1.0, 1.0, 1.0};
  std::array<std::size_t, kMaxDims> points{1, 1, 1};

  std::size_t size() const { return points[0] * points[1] * points[2]; }
  double spacing(int d) const { return 2.0 * half_width[d] / static_cast<double>(points[d]); }
  double coordinate(int d, std::size_t i) const {
    return -half_width[d] + static_cast<double>(i) * spacing(d);
  }
  /// Product of the spacings over the active axes.
  double cell_volume() const;
  /// Signed wavenumber pi*j/L_d of the i-th stored mode along axis d.
  double wavenumber(int d, std::size_t i) const;
  /// Signed integer mode index of storage slot i (0..n/2-1, then -n/2..-1).
  static long signed_mode(std::size_t i, std::size_t n);

  bool operator==(const GridSpec&) const = default;
};

/// Validates and builds a grid. Throws ConfigError on invalid input.
GridSpec make_grid(int dims, std::span<const double> half_widths,
                   std::span<const std::size_t> points);

/// Centered sub-grid with the same spacing and `points` samples per axis.
GridSpec sub_grid(const GridSpec& grid, std::span<const std::size_t> points);

template <class T, std::size_t Alignment = 64>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Alignment>&) noexcept {}
  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Alignment>;
  };
  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Alignment}));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{Alignment}); }
  template <class U>
  bool operator==(const AlignedAllocator<U, Alignment>&) const noexcept {
    return true;
  }
};

using ComplexBuffer = std::vector<Complex, AlignedAllocator<Complex>>;

enum class Space { real, fourier };

/// Complex samples of a field on a grid, tagged with the space they live in.
struct SpectralField {
  GridSpec grid;
  Space space = Space::real;
  ComplexBuffer values;

  SpectralField() = default;
  SpectralField(const GridSpec& g, Space s) : grid(g), space(s), values(g.size(), Complex{}) {}

  std::size_t size() const { return values.size(); }
  Complex& operator[](std::size_t i) { return values[i]; }
  const Complex& operator[](std::size_t i) const { return values[i]; }
};

/// Diagonal Fourier multiplier of the Laplacian, -|kappa|^2 per mode.
struct LaplacianSymbol {
  GridSpec grid;
  std::vector<double> values;
};

LaplacianSymbol laplacian_symbol(const GridSpec& grid);

/// Discrete Fourier transform pair for one grid.
///
/// The forward transform is unnormalized; the inverse carries the 1/n factor
/// so that inverse(forward(f)) == f. Plans are created once per instance and
/// may be executed concurrently from several threads.
class FourierTransform {
 public:
  explicit FourierTransform(const GridSpec& grid);
  ~FourierTransform();
  FourierTransform(FourierTransform&&) noexcept;
  FourierTransform& operator=(FourierTransform&&) noexcept;
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  const GridSpec& grid() const { return grid_; }

  /// Real space -> Fourier space. Throws ConfigError on a wrong space flag.
  SpectralField forward(SpectralField field) const;
  /// Fourier space -> real space.
  SpectralField inverse(SpectralField field) const;

 private:
  struct Plans;
  GridSpec grid_;
  std::unique_ptr<Plans> plans_;
};

/// Grid, transform plans and Laplacian symbol bundled for the solvers.
struct SpectralContext {
  explicit SpectralContext(const GridSpec& g)
      : grid(g), fft(g), laplacian(laplacian_symbol(g)) {}
  GridSpec grid;
  FourierTransform fft;
  LaplacianSymbol laplacian;
};

/// Rectangle rule sum(values) * cell volume; exact trapezoid on a periodic grid.
double quadrature(const GridSpec& grid, std::span<const double> values);

/// Discrete L2 norm squared. Real space uses quadrature of |f|^2, Fourier
/// space uses the Parseval-weighted coefficient sum.
double mass(const SpectralField& field);

/// integral |grad f|^2 computed from Fourier coefficients.
double gradient_norm_squared(const SpectralField& field_hat, const LaplacianSymbol& symbol);

/// Multiplies each Fourier coefficient by the Laplacian symbol.
SpectralField apply_laplacian(SpectralField field_hat, const LaplacianSymbol& symbol);

/// Translates a real-space field by `shift` through a Fourier phase ramp.
/// Nyquist modes use the cosine part so real inputs remain real.
SpectralField translate(const SpectralField& field, const Vec& shift,
                        const FourierTransform& fft);

/// Copies a field sampled on a centered sub-grid (same spacing) into a larger grid.
SpectralField embed_centered(const SpectralField& field, const GridSpec& target);

/// Unravels a flat index into per-axis indices.
std::array<std::size_t, kMaxDims> unravel(const GridSpec& grid, std::size_t flat);

/// Flat index of the grid point mirrored through the origin (X -> -X).
std::size_t mirror_index(const GridSpec& grid, std::size_t flat);

/// Physical position of a grid point.
Vec position(const GridSpec& grid, std::size_t flat);

/// Worker thread count for transforms, taken from NLS_THREADS (default 1).
int transform_threads();

}  // namespace nls
