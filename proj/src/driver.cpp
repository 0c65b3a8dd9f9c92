#include "nls/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "nls/error.hpp"
#include "json.hpp"

namespace nls {

namespace {

PhysicalParams bump_params(const PhysicalParams& base, double mass) {
  PhysicalParams p = base;
  p.mass = mass;
  return p;
}

std::string frame_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.nlsf", step);
  return buf;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

GroundStateResult solve_logged(const GridSpec& grid, const PhysicalParams& params,
                               const FlowConfig& flow, std::ostream& log) {
  log << "ground state: eps=" << params.epsilon << " p=" << params.p << " m=" << params.mass
      << " on " << grid.points[0];
  for (int d = 1; d < grid.dims; ++d) log << 'x' << grid.points[d];
  log << " points\n";
  GroundStateResult gs = solve_ground_state(grid, params, flow);
  log << "  lambda_inf=" << std::setprecision(10) << gs.lambda_inf << " residual=" << gs.residual
      << " steps=" << gs.steps << " t=" << gs.steady_time << '\n';
  return gs;
}

}  // namespace

Simulation::Simulation(const RunConfig& config, std::shared_ptr<const GroundStateResult> profile)
    : config_(config),
      ctx_(std::make_unique<SpectralContext>(config.grid)),
      potential_(config.make_potential()) {
  if (config_.bumps.empty()) throw ConfigError("evolve needs at least [bump.1]");
  const PhysicalParams& params = config_.params;
  if (profile) {
    const PhysicalParams& pp = profile->params;
    if (pp.dims != params.dims || pp.epsilon != params.epsilon || pp.p != params.p) {
      throw ConfigError("profile frame was solved with different (eps, p, N)");
    }
  }
  std::map<double, std::shared_ptr<const GroundStateResult>> by_mass;
  for (const BumpSpec& spec : config_.bumps) {
    std::shared_ptr<const GroundStateResult> gs;
    if (profile) {
      if (spec.mass != profile->params.mass) {
        throw ConfigError("bump mass differs from the mass stored in the profile frame");
      }
      gs = profile;
    } else if (auto it = by_mass.find(spec.mass); it != by_mass.end()) {
      gs = it->second;
    } else {
      gs = std::make_shared<const GroundStateResult>(solve_ground_state(
          config_.profile_grid(), bump_params(params, spec.mass), config_.flow));
      by_mass.emplace(spec.mass, gs);
    }
    bumps_.push_back(Bump{spec.mass, spec.center, spec.velocity, gs});
    embedded_.push_back(gs->profile.grid == config_.grid ? gs->profile
                                                          : embed_centered(gs->profile, config_.grid));
  }
  initial_ = initial_datum(config_.grid, params, bumps_, &warnings_);
  scaled_v_ = scaled_potential(config_.grid, potential_, params);
  if (!potential_.is_harmonic()) {
    for (const Bump& b : bumps_) {
      paths_.push_back(solve_newton(b.center, b.velocity, potential_, config_.propagator.t_final,
                                    config_.newton_step));
    }
  }
}

Vec Simulation::newton_position(std::size_t i, double t) const {
  const Bump& b = bumps_.at(i);
  if (potential_.is_harmonic()) {
    return harmonic_analytic(b.center, b.velocity, *potential_.omega(), config_.params.dims, t).x;
  }
  return paths_.at(i).at(t).x;
}

NewtonTrajectory Simulation::newton_trajectory(std::size_t i) const {
  const Bump& b = bumps_.at(i);
  if (!potential_.is_harmonic()) return paths_.at(i);
  NewtonTrajectory traj;
  traj.dims = config_.params.dims;
  traj.hamiltonian0 = hamiltonian(b.center, b.velocity, potential_);
  const double T = config_.propagator.t_final;
  const double h = config_.newton_step;
  const auto steps = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
  for (std::size_t j = 0; j <= steps; ++j) {
    const double t = std::min(static_cast<double>(j) * h, T);
    traj.samples.push_back(harmonic_analytic(b.center, b.velocity, *potential_.omega(), traj.dims, t));
  }
  return traj;
}

DiagnosticsRow Simulation::diagnostics(const Frame& frame) const {
  const PhysicalParams& params = config_.params;
  DiagnosticsRow row;
  row.t = frame.t;
  row.mass = mass(frame.field);
  row.energy_full = full_energy(frame.field, scaled_v_, params, *ctx_);
  std::vector<SolitonReference> refs;
  for (std::size_t i = 0; i < bumps_.size(); ++i) {
    refs.push_back(SolitonReference{&embedded_[i], newton_position(i, frame.t)});
  }
  row.h_eps_error = soliton_error(frame.field, refs, params, *ctx_);
  const Vec c = center_of_mass(frame.field);
  const double root_eps = std::sqrt(params.epsilon);
  for (int d = 0; d < params.dims; ++d) row.com[d] = root_eps * c[d];
  row.newton_x = refs.front().newton_x;
  return row;
}

DiagnosticsSeries Simulation::run(std::span<const Observer> extra) const {
  DiagnosticsSeries series{config_.params, {}};
  std::vector<Observer> observers;
  observers.emplace_back([&](const Frame& f) { series.rows.push_back(diagnostics(f)); });
  observers.insert(observers.end(), extra.begin(), extra.end());
  propagate(initial_, potential_, config_.params, config_.propagator, observers, *ctx_);
  return series;
}

std::shared_ptr<const GroundStateResult> load_profile(const std::filesystem::path& path, int dims) {
  FrameData frame = read_frame(path);
  if (frame.field.grid.dims != dims) throw ConfigError("profile frame has the wrong dimension");
  auto gs = std::make_shared<GroundStateResult>();
  gs->params = PhysicalParams{frame.meta.epsilon, frame.meta.p, frame.meta.mass, dims};
  gs->params.validate();
  for (auto& v : frame.field.values) v = Complex{v.real(), 0.0};
  gs->profile = std::move(frame.field);
  const SpectralContext ctx(gs->profile.grid);
  gs->lambda_inf = lambda_functional(gs->profile, gs->params, ctx);
  gs->lambda_hat = -gs->lambda_inf;
  gs->energy = energy(gs->profile, gs->params, ctx);
  gs->residual = elliptic_residual(gs->profile, gs->params, gs->lambda_hat, ctx);
  return gs;
}

void run_groundstate(const RunConfig& config, std::ostream& log) {
  const GroundStateResult gs = solve_logged(config.profile_grid(), config.params, config.flow, log);
  ensure_dir(config.output_dir);
  const FrameMeta meta{config.params.epsilon, config.params.p, config.params.mass};
  write_frame(gs.profile, gs.steady_time, meta, config.output_dir / "groundstate.nlsf");
  nlohmann::ordered_json j;
  j["epsilon"] = config.params.epsilon;
  j["p"] = config.params.p;
  j["mass"] = config.params.mass;
  j["dims"] = config.params.dims;
  j["lambda_inf"] = gs.lambda_inf;
  j["lambda_hat"] = gs.lambda_hat;
  j["energy"] = gs.energy;
  j["residual"] = gs.residual;
  j["steady_time"] = gs.steady_time;
  j["steps"] = gs.steps;
  j["rejected"] = gs.rejected;
  j["max_imaginary"] = gs.max_imaginary;
  auto out = open_out(config.output_dir / "groundstate.json");
  out << std::setw(2) << j << '\n';
  if (!out) throw IoError("failed writing groundstate.json");
}

void run_evolve(const RunConfig& config, const std::filesystem::path& profile_path, std::ostream& log) {
  std::shared_ptr<const GroundStateResult> profile;
  if (!profile_path.empty()) profile = load_profile(profile_path, config.params.dims);
  log << "preparing " << config.bumps.size() << " bump(s)\n";
  const Simulation sim(config, profile);
  for (const auto& w : sim.warnings()) log << "warning: " << w << '\n';

  ensure_dir(config.output_dir);
  std::vector<Observer> extra;
  const FrameMeta meta{config.params.epsilon, config.params.p, config.params.mass};
  if (config.write_frames) {
    const auto dir = config.output_dir / "frames";
    ensure_dir(dir);
    extra.emplace_back([dir, meta](const Frame& f) { write_frame(f.field, f.t, meta, dir / frame_name(f.step)); });
  }
  const DiagnosticsSeries series = sim.run(extra);
  write_diagnostics(series, config.output_dir / "diagnostics.csv");
  for (std::size_t i = 0; i < sim.bumps().size(); ++i) {
    auto out = open_out(config.output_dir / ("trajectory_" + std::to_string(i + 1) + ".csv"));
    write_trajectory_csv(sim.newton_trajectory(i), out);
  }
  double worst = 0.0;
  for (const auto& r : series.rows) worst = std::max(worst, r.h_eps_error);
  log << "evolved to t=" << series.rows.back().t << ", " << series.rows.size()
      << " frames, max soliton error " << worst << '\n';
}

void run_newton(const RunConfig& config, std::ostream& log) {
  const Potential pot = config.make_potential();
  ensure_dir(config.output_dir);
  for (std::size_t i = 0; i < config.bumps.size(); ++i) {
    const BumpSpec& b = config.bumps[i];
    const NewtonTrajectory traj =
        solve_newton(b.center, b.velocity, pot, config.propagator.t_final, config.newton_step);
    auto out = open_out(config.output_dir / ("trajectory_" + std::to_string(i + 1) + ".csv"));
    write_trajectory_csv(traj, out);
    const PhaseSample& last = traj.samples.back();
    const double drift = std::abs(hamiltonian(last.x, last.xdot, pot) - traj.hamiltonian0);
    log << "bump " << i + 1 << ": " << traj.samples.size() << " samples, energy drift " << drift << '\n';
  }
}

std::vector<SweepPoint> run_error_sweep(const RunConfig& config, std::ostream& log) {
  if (config.sweep_epsilons.empty()) throw ConfigError("sweep.epsilons is empty");
  ensure_dir(config.output_dir);
  std::vector<SweepPoint> points;
  for (double eps : config.sweep_epsilons) {
    RunConfig run = config;
    run.params.epsilon = eps;
    run.params.validate();
    std::ostringstream tag;
    tag << "eps_" << eps;
    run.output_dir = config.output_dir / tag.str();
    log << "sweep: eps=" << eps << '\n';
    const Simulation sim(run);
    ensure_dir(run.output_dir);
    std::vector<Observer> extra;
    if (run.write_frames) {
      const auto dir = run.output_dir / "frames";
      ensure_dir(dir);
      const FrameMeta meta{eps, run.params.p, run.params.mass};
      extra.emplace_back([dir, meta](const Frame& f) { write_frame(f.field, f.t, meta, dir / frame_name(f.step)); });
    }
    const DiagnosticsSeries series = sim.run(extra);
    write_diagnostics(series, run.output_dir / "diagnostics.csv");
    SweepPoint pt{eps, 0.0, 0.0};
    for (const auto& r : series.rows) pt.max_error = std::max(pt.max_error, r.h_eps_error);
    pt.max_error_over_eps = pt.max_error / eps;
    log << "  max error " << pt.max_error << ", error/eps " << pt.max_error_over_eps << '\n';
    points.push_back(pt);
  }
  auto out = open_out(config.output_dir / "summary.csv");
  out << "epsilon,max_h_eps_error,max_error_over_eps\n" << std::setprecision(17);
  for (const auto& pt : points) out << pt.epsilon << ',' << pt.max_error << ',' << pt.max_error_over_eps << '\n';
  if (!out) throw IoError("failed writing summary.csv");
  return points;
}

}  // namespace nls
