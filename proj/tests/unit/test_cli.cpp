#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "nls/io.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

fs::path workspace(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nls_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const fs::path log = dir / "log.txt";
  const std::string cmd = env + " \"" NLS_CLI_PATH "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path path = dir / "run.cfg";
  std::ofstream(path) << body << "[output]\ndir = " << (dir / "out").string() << "\n";
  return path;
}

const char* kSmall = R"([params]
epsilon = 0.25
p = 0.2
mass = 1
dims = 2
[grid]
half_width = 8
points = 64
[potential]
omega = 2, 1
[bump.1]
center = -0.5, -0.5
velocity = 0.5, 0
[propagator]
step_k = 0.01
t_final = 0.1
frame_stride = 5
)";

std::vector<std::vector<double>> read_csv(const fs::path& path, std::string& header) {
  std::ifstream in(path);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("cli: usage and config errors") {
  const fs::path dir = workspace("usage");
  RunResult r = run("wobble --config x.cfg", dir);
  CHECK(r.code == 2);
  CHECK(r.output.find("groundstate") != std::string::npos);
  CHECK(r.output.find("error-sweep") != std::string::npos);

  r = run("evolve", dir);
  CHECK(r.code == 2);
  CHECK(r.output.find("--config") != std::string::npos);

  r = run("evolve --config " + (dir / "absent.cfg").string(), dir);
  CHECK(r.code == 4);
  CHECK(r.output.find("absent.cfg") != std::string::npos);

  const fs::path cfg = write_config(dir, kSmall);
  r = run("evolve --config " + cfg.string() + " --params.p=1.5", dir);
  CHECK(r.code == 2);
  CHECK(r.output.find("p must satisfy 0 < p < 2/N") != std::string::npos);

  r = run("newton --config " + cfg.string() + " --bump.1.spin=1", dir);
  CHECK(r.code == 2);
  CHECK(r.output.find("spin") != std::string::npos);
}

TEST_CASE("cli: groundstate writes profile and metadata") {
  const fs::path dir = workspace("groundstate");
  const fs::path cfg = write_config(dir, "[params]\nepsilon = 1\np = 0.2\nmass = 1\n[grid]\nhalf_width = 10\npoints = 64\n");
  const RunResult r = run("groundstate -c " + cfg.string(), dir);
  REQUIRE(r.code == 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "out" / "groundstate.json"));
  CHECK(meta.at("epsilon") == 1.0);
  CHECK(meta.at("dims") == 2);
  CHECK(meta.at("lambda_inf").get<double>() == doctest::Approx(-0.379).epsilon(0.02));
  CHECK(meta.at("lambda_hat").get<double>() == -meta.at("lambda_inf").get<double>());
  CHECK(meta.at("residual").get<double>() < 1e-5);

  const nls::FrameData frame = nls::read_frame(dir / "out" / "groundstate.nlsf");
  CHECK(frame.meta.epsilon == 1.0);
  CHECK(frame.meta.p == 0.2);
  CHECK(frame.field.grid.points[0] == 64);
}

TEST_CASE("cli: evolve, determinism and profile reuse") {
  const fs::path a = workspace("evolve_a"), b = workspace("evolve_b"), c = workspace("evolve_c");
  REQUIRE(run("evolve --config " + write_config(a, kSmall).string(), a).code == 0);
  REQUIRE(run("evolve --config " + write_config(b, kSmall).string(), b).code == 0);

  const fs::path out = a / "out";
  std::string header;
  const auto rows = read_csv(out / "diagnostics.csv", header);
  CHECK(header == "t,mass,energy_full,h_eps_error,com_1,com_2,newton_1,newton_2");
  REQUIRE(rows.size() == 3);
  CHECK(rows[2][0] == doctest::Approx(0.1));
  CHECK(std::abs(rows[2][1] - rows[0][1]) <= 1e-10 * rows[0][1]);
  CHECK(rows[0][3] <= 1e-10);
  CHECK(rows[0][6] == -0.5);
  CHECK(fs::exists(out / "trajectory_1.csv"));

  for (const char* name : {"frame_000000.nlsf", "frame_000005.nlsf", "frame_000010.nlsf"}) {
    REQUIRE(fs::exists(out / "frames" / name));
    const nls::FrameData f = nls::read_frame(out / "frames" / name);
    CHECK(f.meta.epsilon == 0.25);
    CHECK(f.meta.p == 0.2);
    CHECK(f.meta.mass == 1.0);
    CHECK(f.field.grid.half_width[0] == 8.0);
    CHECK(slurp(out / "frames" / name) == slurp(b / "out" / "frames" / name));
  }
  CHECK(slurp(out / "diagnostics.csv") == slurp(b / "out" / "diagnostics.csv"));

  // the stored ground state reproduces the run
  REQUIRE(run("groundstate --config " + write_config(c, kSmall).string(), c).code == 0);
  REQUIRE(run("evolve --config " + (c / "run.cfg").string() + " --profile " +
                  (c / "out" / "groundstate.nlsf").string(),
              c)
              .code == 0);
  CHECK(slurp(c / "out" / "diagnostics.csv") == slurp(out / "diagnostics.csv"));
}

TEST_CASE("cli: thread count does not change results beyond rounding") {
  const fs::path one = workspace("threads_1"), two = workspace("threads_2");
  const std::string body = kSmall;
  REQUIRE(run("evolve --config " + write_config(one, body).string(), one, "NLS_THREADS=1").code == 0);
  REQUIRE(run("evolve --config " + write_config(two, body).string(), two, "NLS_THREADS=2").code == 0);
  const nls::FrameData f1 = nls::read_frame(one / "out" / "frames" / "frame_000010.nlsf");
  const nls::FrameData f2 = nls::read_frame(two / "out" / "frames" / "frame_000010.nlsf");
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < f1.field.size(); ++i) {
    worst = std::max(worst, std::abs(f1.field[i] - f2.field[i]));
    scale = std::max(scale, std::abs(f1.field[i]));
  }
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("cli: newton and error-sweep") {
  const fs::path dir = workspace("newton");
  const fs::path cfg = write_config(dir, kSmall);
  REQUIRE(run("newton --config " + cfg.string() + " --propagator.t_final=1", dir).code == 0);
  std::string header;
  const auto traj = read_csv(dir / "out" / "trajectory_1.csv", header);
  CHECK(header == "t,x_1,x_2,xdot_1,xdot_2");
  REQUIRE(traj.size() == 101);
  CHECK(traj.front()[1] == -0.5);
  CHECK(traj.back()[0] == 1.0);

  const fs::path sweep = workspace("sweep");
  const fs::path scfg = write_config(sweep, std::string(kSmall) + "[sweep]\nepsilons = 0.25, 0.125\n");
  const RunResult r = run("error-sweep --config " + scfg.string(), sweep);
  REQUIRE(r.code == 0);
  const auto summary = read_csv(sweep / "out" / "summary.csv", header);
  CHECK(header == "epsilon,max_h_eps_error,max_error_over_eps");
  REQUIRE(summary.size() == 2);
  CHECK(summary[1][0] == 0.125);
  CHECK(summary[1][2] == doctest::Approx(summary[1][1] / 0.125));
  CHECK(fs::exists(sweep / "out" / "eps_0.125" / "diagnostics.csv"));
  CHECK_FALSE(fs::exists(sweep / "out" / "eps_0.125" / "frames"));
}
