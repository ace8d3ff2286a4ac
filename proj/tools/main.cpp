#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "regbf/errors.hpp"

int main(int argc, char** argv) {
  using namespace regbf::cli;
  CLI::App app{"Regularized boundary-focus bifurcation studies"};
  app.require_subcommand(1);
  std::string config_path;
  GlobalOptions g;
  std::string out_dir = g.out_dir.string();
  app.add_option("--config", config_path, "Configuration file (key = value)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads for sweeps");
  app.add_flag("--fast", g.fast, "Skip eps-ladder studies");
  app.add_flag("--seedless", g.seedless, "Reject any configured random sampling");
  for (const auto& name : command_names()) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  g.out_dir = out_dir;
  const std::string cmd = app.get_subcommands().front()->get_name();
  Config cfg;
  try {
    if (!config_path.empty()) cfg = Config::load(config_path);
  } catch (const regbf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  }
  return dispatch(cmd, cfg, g, std::cout, std::cerr);
}
