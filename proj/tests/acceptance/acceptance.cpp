#include <iostream>

#include "cli/verify.hpp"

// Runs every acceptance criterion and prints one line per criterion.
int main() {
  regbf::cli::VerifyOptions opts;
  bool ok = true;
  regbf::cli::run_verify(opts, [&](const regbf::cli::CriterionResult& r) {
    std::cout << regbf::cli::format_line(r) << std::endl;
    ok = ok && r.passed();
  });
  return ok ? 0 : 1;
}
