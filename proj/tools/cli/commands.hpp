#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "regbf/regfun.hpp"

namespace regbf::cli {

enum ExitCode : int { kOk = 0, kCriterionFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

struct GlobalOptions {
  std::filesystem::path out_dir{"out"};
  int threads{1};
  bool fast{false};
  bool seedless{false};
};

const std::vector<std::string>& command_names();

// Runs one subcommand; throws ConfigError or NumericalError on failure.
int run_command(const std::string& name, const Config& cfg, const GlobalOptions& g, std::ostream& log);

// run_command with exceptions mapped to exit codes and reported on err.
int dispatch(const std::string& name, const Config& cfg, const GlobalOptions& g, std::ostream& log,
             std::ostream& err);

// reg.name, or reg.expr with reg.k and reg.beta (and optionally reg.odd).
RegularizationFunction reg_from_config(const Config& cfg, const std::string& fallback = "sqrt_sigmoid");

}  // namespace regbf::cli
