#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "nls/analysis.hpp"
#include "nls/error.hpp"
#include "nls/ground_state.hpp"
#include "oracles.hpp"

using namespace nls;
using std::numbers::pi;

namespace {

GridSpec square(double half_width, std::size_t n) {
  const double w[] = {half_width, half_width};
  const std::size_t p[] = {n, n};
  return make_grid(2, w, p);
}

SpectralField gaussian(const GridSpec& g, const Vec& center, double width = 1.0, Vec k = {}) {
  SpectralField f(g, Space::real);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec X = position(g, i);
    double r2 = 0.0, phase = 0.0;
    for (int d = 0; d < g.dims; ++d) {
      r2 += (X[d] - center[d]) * (X[d] - center[d]);
      phase += k[d] * X[d];
    }
    f[i] = std::polar(std::exp(-0.5 * r2 / (width * width)), phase);
  }
  return f;
}

}  // namespace

TEST_CASE("h_eps norm closed forms") {
  const GridSpec g = square(10.0, 128);
  const SpectralContext ctx(g);

  CHECK(h_eps_norm(SpectralField(g, Space::real), {0.5, 0.2, 1.0, 2}, ctx) == 0.0);

  // e^{-|X|^2/2}: ||U||^2 = pi and ||grad U||^2 = pi
  const SpectralField u = gaussian(g, {});
  const double at_one = h_eps_norm(u, {1.0, 0.2, 1.0, 2}, ctx);
  CHECK(at_one == doctest::Approx(std::sqrt(2 * pi)).epsilon(1e-12));

  const double eps = 0.01;
  const double expected = std::sqrt(pi / eps + pi / (eps * eps));
  CHECK(std::abs(h_eps_norm(u, {eps, 0.2, 1.0, 2}, ctx) - expected) <= 1e-8 * expected);

  CHECK_THROWS_AS(h_eps_norm(ctx.fft.forward(u), {1.0, 0.2, 1.0, 2}, ctx), ConfigError);
}

TEST_CASE("h_eps norm is a norm on random fields") {
  const GridSpec g = square(4.0, 32);
  const SpectralContext ctx(g);
  const PhysicalParams params{0.03, 0.2, 1.0, 2};
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralField a = oracle::random_field(g, rng);
    const SpectralField b = oracle::random_field(g, rng);
    const Complex alpha{-1.7, 0.4};
    SpectralField scaled = a, sum = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
      scaled[i] *= alpha;
      sum[i] += b[i];
    }
    const double na = h_eps_norm(a, params, ctx), nb = h_eps_norm(b, params, ctx);
    CHECK(std::abs(h_eps_norm(scaled, params, ctx) - std::abs(alpha) * na) <= 1e-12 * std::abs(alpha) * na);
    CHECK(h_eps_norm(sum, params, ctx) <= (na + nb) * (1 + 1e-12));
  }
}

TEST_CASE("soliton error compares moduli at the Newton position") {
  const GridSpec g = square(10.0, 128);
  const SpectralContext ctx(g);
  const PhysicalParams params{0.04, 0.2, 1.0, 2};
  const double root_eps = std::sqrt(params.epsilon);
  const SpectralField profile = gaussian(g, {});

  // grid-aligned center: the shifted field is the profile itself
  const Vec on_grid{-2.5, 1.25, 0.0};
  const Vec x_on{on_grid[0] * root_eps, on_grid[1] * root_eps, 0.0};
  CHECK(soliton_error(gaussian(g, on_grid), profile, x_on, params, ctx) <= 1e-10);

  // off-grid center with a velocity phase; only the modulus counts
  const Vec off{1.2345, -0.7071, 0.0};
  const Vec x_off{off[0] * root_eps, off[1] * root_eps, 0.0};
  const SpectralField moving = gaussian(g, off, 1.0, {3.0, -1.5, 0.0});
  CHECK(soliton_error(moving, profile, x_off, params, ctx) <= 1e-9);

  // a misplaced reference sees the full bump twice over
  const double miss = soliton_error(moving, profile, {0.0, 0.0, 0.0}, params, ctx);
  CHECK(miss > 0.5 * h_eps_norm(profile, params, ctx));

  const Vec outside{12.0 * root_eps, 0.0, 0.0};
  CHECK_THROWS_AS(soliton_error(moving, profile, outside, params, ctx), ConfigError);

  const GridSpec other = square(10.0, 64);
  const SpectralField wrong = gaussian(other, {});
  CHECK_THROWS_AS(soliton_error(moving, wrong, x_off, params, ctx), ConfigError);
}

TEST_CASE("two-bump soliton error sums both references") {
  const GridSpec g = square(12.0, 128);
  const SpectralContext ctx(g);
  const PhysicalParams params{0.25, 0.2, 1.0, 2};
  const SpectralField profile = gaussian(g, {});
  const Vec a{-5.1, -4.3, 0.0}, b{4.7, 3.9, 0.0};
  SpectralField field = gaussian(g, a, 1.0, {1.0, 0.0, 0.0});
  const SpectralField second = gaussian(g, b);
  for (std::size_t i = 0; i < field.size(); ++i) field[i] += second[i];
  const SolitonReference refs[] = {{&profile, {a[0] * 0.5, a[1] * 0.5, 0.0}},
                                   {&profile, {b[0] * 0.5, b[1] * 0.5, 0.0}}};
  CHECK(soliton_error(field, refs, params, ctx) <= 1e-9);
}

TEST_CASE("center of mass") {
  const GridSpec g = square(10.0, 128);

  const Vec c{1.25, -0.5, 0.0};
  const Vec com = center_of_mass(gaussian(g, c, 1.3, {2.0, 1.0, 0.0}));
  CHECK(std::abs(com[0] - c[0]) <= 1e-10);
  CHECK(std::abs(com[1] - c[1]) <= 1e-10);

  // a translated profile off the grid points
  const SpectralContext ctx(g);
  const Vec shift{0.377, -1.913, 0.0};
  const Vec moved = center_of_mass(translate(gaussian(g, {}), shift, ctx.fft));
  CHECK(std::abs(moved[0] - shift[0]) <= 1e-8);
  CHECK(std::abs(moved[1] - shift[1]) <= 1e-8);

  // disjoint bumps of different weight, split by the X_1 = 0 line
  const Vec left{-5.0, 2.0, 0.0}, right{5.5, -1.0, 0.0};
  SpectralField two = gaussian(g, left);
  const SpectralField r = gaussian(g, right, 0.8);
  for (std::size_t i = 0; i < two.size(); ++i) two[i] += 2.0 * r[i];
  const auto is_left = [](const Vec& X) { return X[0] < 0.0; };
  const auto is_right = [](const Vec& X) { return X[0] >= 0.0; };
  const Vec cl = center_of_mass(two, is_left), cr = center_of_mass(two, is_right);
  for (int d = 0; d < 2; ++d) {
    CHECK(std::abs(cl[d] - left[d]) <= 1e-6);
    CHECK(std::abs(cr[d] - right[d]) <= 1e-6);
  }
  double ml = 0.0, mr = 0.0;
  for (std::size_t i = 0; i < two.size(); ++i) (is_left(position(g, i)) ? ml : mr) += std::norm(two[i]);
  const Vec all = center_of_mass(two);
  for (int d = 0; d < 2; ++d) CHECK(std::abs(all[d] - (ml * cl[d] + mr * cr[d]) / (ml + mr)) <= 1e-6);

  CHECK_THROWS_AS(center_of_mass(SpectralField(g, Space::real)), NumericError);
  CHECK_THROWS_AS(center_of_mass(two, [](const Vec& X) { return X[0] > 100.0; }), NumericError);
}

TEST_CASE("full energy") {
  const GridSpec g = square(10.0, 128);
  const SpectralContext ctx(g);
  const std::vector<double> zero_v(g.size(), 0.0);
  const PhysicalParams params{0.02, 0.2, 1.0, 2};

  CHECK(full_energy(SpectralField(g, Space::real), zero_v, params, ctx) == 0.0);

  // without a trap it is the gradient-flow energy divided by eps
  const SpectralField seed = gaussian_seed(g, {1.0, 0.2, 1.0, 2});
  for (double eps : {1.0, 0.1, 0.02}) {
    const PhysicalParams q{eps, 0.2, 1.0, 2};
    const double e_flow = energy(seed, q, ctx);
    CHECK(std::abs(full_energy(seed, zero_v, q, ctx) - e_flow / eps) <= 1e-10 * std::abs(e_flow / eps));
  }

  // trap term of a Gaussian: int w^2 |X|^2 e^{-|X|^2} = w^2 pi, kinetic pi / 2
  std::vector<double> trap(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec X = position(g, i);
    trap[i] = 4.0 * X[0] * X[0] + X[1] * X[1];
  }
  const SpectralField u = gaussian(g, {});
  const PhysicalParams weak{1.0, 1e-9, 1.0, 2};
  // the nonlinear part tends to int |U|^2 / (p + 1) as p -> 0
  const double expected = 0.5 * pi + 2.5 * pi - pi / (1.0 + 1e-9);
  CHECK(full_energy(u, trap, weak, ctx) == doctest::Approx(expected).epsilon(1e-7));
}
