#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nls/error.hpp"
#include "nls/spectral_grid.hpp"
#include "oracles.hpp"

using namespace nls;
using std::numbers::pi;

namespace {

GridSpec grid1(double L, std::size_t n) {
  const double w[] = {L};
  const std::size_t p[] = {n};
  return make_grid(1, w, p);
}

GridSpec grid2(double L, std::size_t n, double L2, std::size_t n2) {
  const double w[] = {L, L2};
  const std::size_t p[] = {n, n2};
  return make_grid(2, w, p);
}

double rel_l2(const SpectralField& a, const SpectralField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("make_grid builds uniform coordinates") {
  const GridSpec g = grid1(pi, 4);
  CHECK(g.coordinate(0, 0) == doctest::Approx(-pi));
  CHECK(g.coordinate(0, 1) == doctest::Approx(-pi / 2));
  CHECK(g.coordinate(0, 2) == doctest::Approx(0.0));
  CHECK(g.coordinate(0, 3) == doctest::Approx(pi / 2));
  CHECK(g.size() == 4);

  const GridSpec g2 = grid2(10, 256, 10, 256);
  CHECK(g2.spacing(0) == 0.078125);
  CHECK(g2.spacing(1) == 0.078125);
  CHECK(g2.size() == 65536);
}

TEST_CASE("make_grid rejects invalid input") {
  CHECK_THROWS_AS(grid1(pi, 6), ConfigError);
  CHECK_THROWS_AS(grid1(0.0, 8), ConfigError);
  CHECK_THROWS_AS(grid1(-1.0, 8), ConfigError);
  const double w[] = {1, 1, 1, 1};
  const std::size_t p[] = {8, 8, 8, 8};
  CHECK_THROWS_AS(make_grid(4, w, p), ConfigError);
  CHECK_THROWS_AS(make_grid(0, w, p), ConfigError);
  CHECK_THROWS_AS(make_grid(2, std::span(w, 1), std::span(p, 2)), ConfigError);
}

TEST_CASE("laplacian symbol in signed mode order") {
  const auto s = laplacian_symbol(grid1(pi, 4));
  REQUIRE(s.values.size() == 4);
  CHECK(s.values[0] == 0.0);
  CHECK(s.values[1] == doctest::Approx(-1.0));
  CHECK(s.values[2] == doctest::Approx(-4.0));
  CHECK(s.values[3] == doctest::Approx(-1.0));

  const GridSpec g = grid2(pi, 4, pi, 4);
  const auto s2 = laplacian_symbol(g);
  CHECK(s2.values[0] == 0.0);
  CHECK(s2.values[1 * 4 + 1] == doctest::Approx(-2.0));
  for (double v : s2.values) CHECK(v <= 0.0);

  const auto s3 = laplacian_symbol(grid2(7.0, 32, 3.0, 16));
  for (double v : s3.values) CHECK(v <= 0.0);
  CHECK(s3.values[0] == 0.0);
}

TEST_CASE("forward transform of simple fields") {
  const GridSpec g = grid1(pi, 8);
  const FourierTransform fft(g);
  SpectralField c(g, Space::real);
  for (auto& v : c.values) v = 2.5;
  const SpectralField ch = fft.forward(c);
  CHECK(ch.space == Space::fourier);
  CHECK(std::abs(ch[0] - Complex(2.5 * 8)) < 1e-12);
  for (std::size_t i = 1; i < 8; ++i) CHECK(std::abs(ch[i]) < 1e-12);

  SpectralField w(g, Space::real);
  for (std::size_t i = 0; i < 8; ++i) w[i] = std::polar(1.0, g.coordinate(0, i));
  const SpectralField wh = fft.forward(w);
  for (std::size_t i = 0; i < 8; ++i) {
    if (i == 1) {
      CHECK(std::abs(wh[i]) == doctest::Approx(8.0));
    } else {
      CHECK(std::abs(wh[i]) < 1e-12);
    }
  }
}

TEST_CASE("transforms match a direct DFT and invert each other") {
  std::mt19937_64 rng(11);
  const GridSpec g = grid2(3.0, 8, 5.0, 16);
  const FourierTransform fft(g);
  const SpectralField f = oracle::random_field(g, rng);
  const SpectralField fh = fft.forward(f);
  const auto ref = oracle::dft(g, std::vector<Complex>(f.values.begin(), f.values.end()), -1);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(fh[i] - ref[i]));
  CHECK(err < 1e-11);

  const SpectralField back = fft.inverse(fh);
  CHECK(back.space == Space::real);
  CHECK(rel_l2(back, f) < 1e-12);

  CHECK_THROWS_AS(fft.forward(fh), ConfigError);
  CHECK_THROWS_AS(fft.inverse(f), ConfigError);
}

TEST_CASE("round trip on random 3D fields") {
  std::mt19937_64 rng(5);
  const double w[] = {1.0, 2.0, 3.0};
  const std::size_t p[] = {8, 16, 32};
  const GridSpec g = make_grid(3, w, p);
  const FourierTransform fft(g);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralField f = oracle::random_field(g, rng);
    CHECK(rel_l2(fft.inverse(fft.forward(f)), f) < 1e-12);
  }
}

TEST_CASE("transforms are linear") {
  std::mt19937_64 rng(3);
  const GridSpec g = grid2(4.0, 16, 4.0, 32);
  const FourierTransform fft(g);
  const SpectralField f = oracle::random_field(g, rng);
  const SpectralField h = oracle::random_field(g, rng);
  const Complex a{0.3, -1.2}, b{2.0, 0.5};
  SpectralField comb(g, Space::real);
  for (std::size_t i = 0; i < g.size(); ++i) comb[i] = a * f[i] + b * h[i];
  const SpectralField lhs = fft.forward(comb);
  const SpectralField fh = fft.forward(f), hh = fft.forward(h);
  SpectralField rhs(g, Space::fourier);
  for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = a * fh[i] + b * hh[i];
  CHECK(rel_l2(lhs, rhs) < 1e-13);
}

TEST_CASE("quadrature") {
  const GridSpec g = grid1(pi, 8);
  std::vector<double> ones(8, 1.0);
  CHECK(quadrature(g, ones) == doctest::Approx(2 * pi).epsilon(1e-15));
  std::vector<double> zeros(8, 0.0);
  CHECK(quadrature(g, zeros) == 0.0);

  const GridSpec g2 = grid2(12.0, 128, 12.0, 128);
  std::vector<double> gauss(g2.size());
  for (std::size_t i = 0; i < g2.size(); ++i) {
    const Vec X = position(g2, i);
    gauss[i] = std::exp(-(X[0] * X[0] + X[1] * X[1]));
  }
  CHECK(std::abs(quadrature(g2, gauss) - pi) < 1e-10);
}

TEST_CASE("Parseval identity") {
  std::mt19937_64 rng(17);
  const GridSpec g = grid2(2.0, 32, 6.0, 64);
  const FourierTransform fft(g);
  for (int trial = 0; trial < 4; ++trial) {
    const SpectralField f = oracle::random_field(g, rng);
    const double real_side = mass(f);
    const double fourier_side = mass(fft.forward(f));
    CHECK(std::abs(real_side - fourier_side) <= 1e-12 * real_side);
  }
}

TEST_CASE("spectral Laplacian of a sine") {
  const double L = 3.0;
  const GridSpec g = grid1(L, 32);
  const SpectralContext ctx(g);
  SpectralField f(g, Space::real);
  for (std::size_t i = 0; i < 32; ++i) f[i] = std::sin(pi * g.coordinate(0, i) / L);
  const SpectralField lap = ctx.fft.inverse(apply_laplacian(ctx.fft.forward(f), ctx.laplacian));
  const double k2 = (pi / L) * (pi / L);
  for (std::size_t i = 0; i < 32; ++i) CHECK(std::abs(lap[i] + k2 * f[i]) < 1e-10);
}

TEST_CASE("symbol acts on plane waves and matches the DFT oracle") {
  const GridSpec g = grid2(pi, 16, 2 * pi, 8);
  const SpectralContext ctx(g);
  SpectralField f(g, Space::real);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec X = position(g, i);
    f[i] = std::polar(1.0, 3.0 * X[0] - 1.5 * X[1]);
  }
  const SpectralField lap = ctx.fft.inverse(apply_laplacian(ctx.fft.forward(f), ctx.laplacian));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(lap[i] + (9.0 + 2.25) * f[i]) < 1e-10);

  std::mt19937_64 rng(23);
  const SpectralField r = oracle::random_field(g, rng);
  const auto ref = oracle::laplacian(g, std::vector<Complex>(r.values.begin(), r.values.end()));
  const SpectralField mine = ctx.fft.inverse(apply_laplacian(ctx.fft.forward(r), ctx.laplacian));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(mine[i] - ref[i]));
  CHECK(err < 1e-9);
}

TEST_CASE("gradient norm of a Gaussian") {
  const GridSpec g = grid2(10.0, 128, 10.0, 128);
  const SpectralContext ctx(g);
  SpectralField f(g, Space::real);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec X = position(g, i);
    f[i] = std::exp(-(X[0] * X[0] + X[1] * X[1]) / 2);
  }
  // int |grad e^{-|X|^2/2}|^2 = int |X|^2 e^{-|X|^2} = pi in 2D
  CHECK(std::abs(gradient_norm_squared(ctx.fft.forward(f), ctx.laplacian) - pi) < 1e-10);
}

TEST_CASE("spectral translation") {
  const GridSpec g = grid2(10.0, 128, 10.0, 128);
  const FourierTransform fft(g);
  SpectralField f(g, Space::real);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec X = position(g, i);
    f[i] = std::exp(-(X[0] * X[0] + X[1] * X[1]));
  }
  const Vec shift{1.2345, -2.5, 0.0};
  const SpectralField t = translate(f, shift, fft);
  double err = 0.0, imag = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec X = position(g, i);
    const double dx = X[0] - shift[0], dy = X[1] - shift[1];
    err = std::max(err, std::abs(t[i].real() - std::exp(-(dx * dx + dy * dy))));
    imag = std::max(imag, std::abs(t[i].imag()));
  }
  CHECK(err < 1e-12);
  CHECK(imag < 1e-14);
  CHECK(std::abs(mass(t) - mass(f)) < 1e-13 * mass(f));

  const SpectralField back = translate(t, Vec{-shift[0], -shift[1], 0.0}, fft);
  CHECK(rel_l2(back, f) < 1e-12);
}

TEST_CASE("sub grids and embedding") {
  const GridSpec g = grid2(10.0, 64, 5.0, 32);
  const std::size_t pts[] = {16, 8};
  const GridSpec s = sub_grid(g, pts);
  CHECK(s.spacing(0) == g.spacing(0));
  CHECK(s.spacing(1) == g.spacing(1));
  CHECK(s.half_width[0] == doctest::Approx(2.5));
  SpectralField f(s, Space::real);
  for (std::size_t i = 0; i < s.size(); ++i) f[i] = static_cast<double>(i + 1);
  const SpectralField e = embed_centered(f, g);
  double total_small = 0.0, total_big = 0.0;
  for (const auto& v : f.values) total_small += v.real();
  for (const auto& v : e.values) total_big += v.real();
  CHECK(total_small == total_big);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec X = position(s, i);
    // find the same point in the big grid
    const auto ix = static_cast<std::size_t>(std::lround((X[0] + g.half_width[0]) / g.spacing(0)));
    const auto iy = static_cast<std::size_t>(std::lround((X[1] + g.half_width[1]) / g.spacing(1)));
    CHECK(e[ix * 32 + iy] == f[i]);
  }
  const std::size_t too_big[] = {128, 8};
  CHECK_THROWS_AS(sub_grid(g, too_big), ConfigError);
}

TEST_CASE("mirror index and positions") {
  const GridSpec g = grid2(1.0, 8, 2.0, 16);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t m = mirror_index(g, i);
    const Vec a = position(g, i), b = position(g, m);
    // -L maps to itself on a periodic grid
    if (std::abs(a[0] + 1.0) > 1e-12) CHECK(b[0] == doctest::Approx(-a[0]));
    if (std::abs(a[1] + 2.0) > 1e-12) CHECK(b[1] == doctest::Approx(-a[1]));
    CHECK(mirror_index(g, m) == i);
  }
}
