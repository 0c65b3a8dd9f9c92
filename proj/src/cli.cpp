#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nls/driver.hpp"
#include "nls/error.hpp"

namespace nls {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Pulls "--section.key=value" overrides out of argv before CLI11 sees it.
std::vector<ConfigOverride> split_overrides(int argc, char** argv, std::vector<std::string>& rest) {
  std::vector<ConfigOverride> out;
  for (int i = 0; i < argc; ++i) {
    const std::string arg = argv[i];
    const auto eq = arg.find('=');
    if (i > 0 && arg.rfind("--", 0) == 0 && eq != std::string::npos &&
        arg.substr(2, eq - 2).find('.') != std::string::npos) {
      out.emplace_back(arg.substr(2, eq - 2), arg.substr(eq + 1));
    } else {
      rest.push_back(arg);
    }
  }
  return out;
}

}  // namespace

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  const std::vector<ConfigOverride> overrides = split_overrides(argc, argv, args);

  CLI::App app{"Ground states and soliton dynamics of the semiclassical NLS with a trap"};
  app.require_subcommand(1);
  app.footer("Override any config value with --section.key=value, e.g. --params.epsilon=0.02");
  std::filesystem::path config_path;
  std::filesystem::path profile_path;
  std::map<std::string, Mode> modes{{"groundstate", Mode::groundstate},
                                    {"evolve", Mode::evolve},
                                    {"newton", Mode::newton},
                                    {"error-sweep", Mode::error_sweep}};
  const std::map<std::string, std::string> blurbs{
      {"groundstate", "solve the normalized gradient flow and write the profile"},
      {"evolve", "propagate a one- or two-bump datum and write frames and diagnostics"},
      {"newton", "integrate the classical Newton trajectories"},
      {"error-sweep", "run evolve for each sweep epsilon and summarize the soliton error"}};
  for (const auto& [name, mode] : modes) {
    CLI::App* sub = app.add_subcommand(name, blurbs.at(name));
    sub->add_option("--config,-c", config_path, "run configuration file")->required();
    if (mode == Mode::evolve) sub->add_option("--profile", profile_path, "ground-state frame to reuse");
  }

  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kConfigFailure;
  }

  const Mode mode = modes.at(app.get_subcommands().front()->get_name());
  try {
    const RunConfig config = parse_config(read_text(config_path), mode, overrides);
    switch (mode) {
      case Mode::groundstate:
        run_groundstate(config, std::cerr);
        break;
      case Mode::evolve:
        run_evolve(config, profile_path, std::cerr);
        break;
      case Mode::newton:
        run_newton(config, std::cerr);
        break;
      case Mode::error_sweep:
        run_error_sweep(config, std::cerr);
        break;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnexpected;
  }
  return kOk;
}

}  // namespace nls
