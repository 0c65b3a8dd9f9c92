#include "nls/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sum.hpp"

namespace nls {

namespace {

constexpr double kPi = std::numbers::pi;

bool all_finite(const ComplexBuffer& v) {
  return std::all_of(v.begin(), v.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

// int |R|^(2p+2) over the grid.
double power_integral(const SpectralField& field, double p) {
  detail::CompensatedSum sum;
  for (const auto& v : field.values) sum.add(std::pow(std::abs(v), 2.0 * p + 2.0));
  return sum.value() * field.grid.cell_volume();
}

struct EnergyTerms {
  double gradient = 0.0;  // int |grad R|^2
  double power = 0.0;     // int |R|^(2p+2)
  double mass = 0.0;
};

EnergyTerms energy_terms(const SpectralField& real, const SpectralField& hat, double p,
                         const LaplacianSymbol& laplacian) {
  return {gradient_norm_squared(hat, laplacian), power_integral(real, p), mass(real)};
}

double energy_from(const EnergyTerms& t, const PhysicalParams& pp) {
  return 0.5 * pp.epsilon * t.gradient - pp.flow_coupling() / (pp.p + 1.0) * t.power;
}

double lambda_from(const EnergyTerms& t, const PhysicalParams& pp) {
  if (!(t.mass > 0.0)) throw NumericError("Lambda(R) is undefined for a zero-mass field");
  return (0.5 * pp.epsilon * t.gradient - pp.flow_coupling() * t.power) / t.mass;
}

// Pointwise eps^(-Np/2) R^(2p+1) + lambda R with negative undershoots clamped.
SpectralField nonlinear_real(const SpectralField& real, const PhysicalParams& pp, double lambda) {
  SpectralField out(real.grid, Space::real);
  const double c = pp.flow_coupling();
  const double q = 2.0 * pp.p + 1.0;
  for (std::size_t i = 0; i < real.size(); ++i) {
    const double r = std::max(real[i].real(), 0.0);
    out[i] = c * std::pow(r, q) + lambda * real[i].real();
  }
  return out;
}

// f(R_hat) for the flow, returned as Fourier coefficients.
ComplexBuffer flow_nonlinear_hat(const ComplexBuffer& hat_values, const PhysicalParams& pp,
                                 const SpectralContext& ctx) {
  SpectralField hat(ctx.grid, Space::fourier);
  hat.values = hat_values;
  const double grad = gradient_norm_squared(hat, ctx.laplacian);
  SpectralField real = ctx.fft.inverse(std::move(hat));
  const double m = mass(real);
  const double pw = power_integral(real, pp.p);
  const double lambda = lambda_from({grad, pw, m}, pp);
  return ctx.fft.forward(nonlinear_real(real, pp, lambda)).values;
}

}  // namespace

void PhysicalParams::validate() const {
  if (dims < 1 || dims > kMaxDims) throw ConfigError("dims must be 1, 2 or 3");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("mass must be positive");
  if (!(p > 0.0) || !(p < 2.0 / dims)) {
    throw ConfigError("p must satisfy 0 < p < 2/N (got p = " + std::to_string(p) +
                      ", N = " + std::to_string(dims) + ")");
  }
}

void FlowConfig::validate() const {
  if (!(energy_tol > 0.0) || !(step_tol > 0.0)) throw ConfigError("flow tolerances must be positive");
  if (!(k_init > 0.0) || !(k_max > 0.0)) throw ConfigError("flow time steps must be positive");
  if (k_init > k_max) throw ConfigError("flow: k_init must not exceed k_max");
  if (max_steps == 0) throw ConfigError("flow: max_steps must be positive");
}

GaussianCoefficients gaussian_coefficients(const PhysicalParams& pp) {
  pp.validate();
  const int n = pp.dims;
  const double np = n * pp.p;
  if (np >= 2.0) throw ConfigError("gaussian seed requires N p < 2");
  GaussianCoefficients g;
  const double eps_n = std::pow(pp.epsilon, n);
  g.a = pp.mass * n * eps_n / 4.0;
  g.b = std::pow(pp.mass, pp.p + 1.0) * eps_n /
        (std::pow(kPi, np / 2.0) * std::pow(pp.p + 1.0, 1.0 + n / 2.0));
  g.sigma = std::pow(g.b * np / (2.0 * g.a), 1.0 / (2.0 - np));
  return g;
}

SpectralField gaussian_profile(const GridSpec& grid, const PhysicalParams& pp, double sigma) {
  if (grid.dims != pp.dims) throw ConfigError("gaussian_profile: grid and params dims differ");
  SpectralField out(grid, Space::real);
  const int n = pp.dims;
  const double amp = std::sqrt(pp.mass) * std::pow(sigma, n / 2.0) *
                     std::pow(pp.epsilon / kPi, n / 4.0);
  const double w = sigma * sigma / pp.epsilon;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Vec x = position(grid, i);
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    out[i] = amp * std::exp(-0.5 * w * r2);
  }
  return out;
}

SpectralField gaussian_seed(const GridSpec& grid, const PhysicalParams& pp) {
  const auto g = gaussian_coefficients(pp);
  SpectralField seed = gaussian_profile(grid, pp, g.sigma);
  const double scale = std::sqrt(pp.scaled_mass() / mass(seed));
  for (auto& v : seed.values) v *= scale;
  return seed;
}

double energy(const SpectralField& field, const PhysicalParams& pp, const SpectralContext& ctx) {
  if (field.space != Space::real) throw ConfigError("energy: real-space field required");
  const SpectralField hat = ctx.fft.forward(field);
  return energy_from(energy_terms(field, hat, pp.p, ctx.laplacian), pp);
}

double lambda_functional(const SpectralField& field, const PhysicalParams& pp,
                         const SpectralContext& ctx) {
  if (field.space != Space::real) throw ConfigError("lambda_functional: real-space field required");
  const SpectralField hat = ctx.fft.forward(field);
  return lambda_from(energy_terms(field, hat, pp.p, ctx.laplacian), pp);
}

SpectralField flow_rhs_nonlinear(const SpectralField& field, const PhysicalParams& pp,
                                 const SpectralContext& ctx) {
  if (field.space != Space::real) throw ConfigError("flow_rhs_nonlinear: real-space field required");
  const double m = mass(field);
  const double lambda = m > 0.0 ? lambda_functional(field, pp, ctx) : 0.0;
  return ctx.fft.forward(nonlinear_real(field, pp, lambda));
}

double phi1(double z) {
  if (std::abs(z) < 1e-8) return 1.0 + 0.5 * z;
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1.0) {
    // sum_{j>=0} z^j / (j+2)!
    double term = 0.5;
    double sum = 0.5;
    for (int j = 1; j < 24; ++j) {
      term *= z / (j + 2);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

Erk2Step erk2_step(const SpectralField& field_hat, double k, const PhysicalParams& pp,
                   const SpectralContext& ctx) {
  if (field_hat.space != Space::fourier) throw ConfigError("erk2_step: Fourier-space field required");
  if (!(k > 0.0)) throw ConfigError("erk2_step: step must be positive");
  std::vector<double> linear(ctx.laplacian.values.size());
  for (std::size_t i = 0; i < linear.size(); ++i) {
    linear[i] = 0.5 * pp.epsilon * ctx.laplacian.values[i];
  }
  auto f = [&](const ComplexBuffer& u, double) { return flow_nonlinear_hat(u, pp, ctx); };
  Erk2Update up = exponential_rk2(field_hat.values, linear, k, 0.0, f);
  if (!all_finite(up.next) || !std::isfinite(up.error_sq)) {
    throw NumericError("gradient flow produced nonfinite values (step k = " + std::to_string(k) +
                       "); reduce k_init or step_tol");
  }
  Erk2Step out;
  out.next = SpectralField(ctx.grid, Space::fourier);
  out.next.values = std::move(up.next);
  out.error_estimate =
      std::sqrt(up.error_sq * ctx.grid.cell_volume() / static_cast<double>(ctx.grid.size()));
  return out;
}

GroundStateResult solve_ground_state(const GridSpec& grid, const PhysicalParams& pp,
                                     const FlowConfig& config, const FlowMonitor& monitor) {
  pp.validate();
  config.validate();
  if (grid.dims != pp.dims) throw ConfigError("solve_ground_state: grid and params dims differ");

  const SpectralContext ctx(grid);
  const double target = pp.scaled_mass();
  SpectralField real = gaussian_seed(grid, pp);
  SpectralField hat = ctx.fft.forward(real);
  double e_prev = energy_from(energy_terms(real, hat, pp.p, ctx.laplacian), pp);

  GroundStateResult res;
  res.params = pp;
  double k = config.k_init;
  double t = 0.0;
  int calm = 0;
  std::size_t attempts = 0;

  while (true) {
    if (attempts++ >= config.max_steps) {
      throw NumericError("gradient flow did not reach a steady state within " +
                         std::to_string(config.max_steps) + " steps (t = " + std::to_string(t) +
                         ")");
    }
    Erk2Step step = erk2_step(hat, k, pp, ctx);
    const double norm = std::sqrt(mass(hat));
    const double ratio = step.error_estimate / (config.step_tol * norm);
    const double factor =
        ratio > 0.0 ? std::clamp(0.9 / std::sqrt(ratio), 0.25, 4.0) : 4.0;
    if (ratio > 1.0) {
      ++res.rejected;
      k *= std::min(factor, 1.0);
      continue;
    }

    hat = std::move(step.next);
    t += k;
    ++res.steps;
    const double m_before = mass(hat);
    if (config.renormalize) {
      const double s = std::sqrt(target / m_before);
      for (auto& v : hat.values) v *= s;
    }
    real = ctx.fft.inverse(hat);
    double peak = 0.0;
    double imag = 0.0;
    for (auto& v : real.values) {
      peak = std::max(peak, std::abs(v.real()));
      imag = std::max(imag, std::abs(v.imag()));
      v = Complex{v.real(), 0.0};
    }
    res.max_imaginary = peak > 0.0 ? imag / peak : 0.0;

    const double e = energy_from(energy_terms(real, hat, pp.p, ctx.laplacian), pp);
    if (monitor) monitor({res.steps, t, k, e, m_before, step.error_estimate});
    calm = std::abs(e - e_prev) <= config.energy_tol * k * std::abs(e) ? calm + 1 : 0;
    e_prev = e;
    if (calm >= 2) break;
    k = std::min(k * factor, config.k_max);
  }

  res.steady_time = t;
  res.energy = e_prev;
  res.lambda_inf = lambda_from(energy_terms(real, hat, pp.p, ctx.laplacian), pp);
  res.lambda_hat = -res.lambda_inf;
  res.profile = std::move(real);
  res.residual = elliptic_residual(res.profile, pp, res.lambda_hat, ctx);
  return res;
}

double elliptic_residual(const SpectralField& profile, const PhysicalParams& pp, double lambda_hat,
                         const SpectralContext& ctx) {
  if (profile.space != Space::real) throw ConfigError("elliptic_residual: real-space field required");
  SpectralField lap = ctx.fft.inverse(apply_laplacian(ctx.fft.forward(profile), ctx.laplacian));
  const double c = pp.flow_coupling();
  const double q = 2.0 * pp.p + 1.0;
  detail::CompensatedSum res2;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double r = profile[i].real();
    const double v = 0.5 * pp.epsilon * lap[i].real() + c * std::pow(std::max(r, 0.0), q) -
                     lambda_hat * r;
    res2.add(v * v);
  }
  const double m = mass(profile);
  if (!(m > 0.0)) throw NumericError("elliptic_residual: zero-mass profile");
  return std::sqrt(res2.value() * profile.grid.cell_volume() / m);
}

namespace {

// Applies a per-axis complex matrix (rows: output index, cols: input index)
// along axis `axis` of a row-major array.
ComplexBuffer apply_along_axis(const ComplexBuffer& in, const GridSpec& g, int axis,
                               const std::vector<Complex>& matrix) {
  const std::size_t n = g.points[axis];
  std::size_t inner = 1;
  for (int d = axis + 1; d < kMaxDims; ++d) inner *= g.points[d];
  std::size_t outer = 1;
  for (int d = 0; d < axis; ++d) outer *= g.points[d];
  ComplexBuffer out(in.size());
  std::vector<Complex> line(n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < inner; ++s) {
      const std::size_t base = o * n * inner + s;
      for (std::size_t j = 0; j < n; ++j) line[j] = in[base + j * inner];
      for (std::size_t i = 0; i < n; ++i) {
        Complex acc{};
        const Complex* row = &matrix[i * n];
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * line[j];
        out[base + i * inner] = acc;
      }
    }
  }
  return out;
}

}  // namespace

SpectralField rescale_profile(const SpectralField& profile, double lambda_from,
                              double lambda_to, double p) {
  if (!(lambda_from > 0.0) || !(lambda_to > 0.0)) {
    throw ConfigError("rescale_profile: eigenvalues must be positive");
  }
  if (!(p > 0.0)) throw ConfigError("rescale_profile: p must be positive");
  if (profile.space != Space::real) throw ConfigError("rescale_profile: real-space field required");
  const double ratio = lambda_to / lambda_from;
  const double gamma = std::sqrt(ratio);
  const double mu = std::pow(ratio, 1.0 / (2.0 * p));
  const GridSpec& g = profile.grid;

  const FourierTransform fft(g);
  ComplexBuffer data = fft.forward(profile).values;
  for (int d = 0; d < g.dims; ++d) {
    const std::size_t n = g.points[d];
    const double L = g.half_width[d];
    std::vector<Complex> m(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = gamma * g.coordinate(d, i);
      if (x < -L || x >= L) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double arg = g.wavenumber(d, j) * (x + L);
        m[i * n + j] = (j == n / 2 ? Complex{std::cos(arg), 0.0} : std::polar(1.0, arg)) /
                       static_cast<double>(n);
      }
    }
    data = apply_along_axis(data, g, d, m);
  }
  SpectralField out(g, Space::real);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mu * data[i].real();
  return out;
}

double mirror_defect(const SpectralField& profile) {
  double worst = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    worst = std::max(worst, std::abs(profile[i] - profile[mirror_index(profile.grid, i)]));
  }
  return worst;
}

std::vector<double> radial_average(const SpectralField& profile, double bin_width) {
  const GridSpec& g = profile.grid;
  double rmax = g.half_width[0];
  for (int d = 1; d < g.dims; ++d) rmax = std::min(rmax, g.half_width[d]);
  const auto bins = static_cast<std::size_t>(rmax / bin_width);
  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Vec x = position(g, i);
    double r2 = 0.0;
    for (int d = 0; d < g.dims; ++d) r2 += x[d] * x[d];
    const auto b = static_cast<std::size_t>(std::sqrt(r2) / bin_width);
    if (b >= bins) continue;
    sum[b] += profile[i].real();
    ++count[b];
  }
  std::vector<double> avg;
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] > 0) avg.push_back(sum[b] / static_cast<double>(count[b]));
  }
  return avg;
}

}  // namespace nls
