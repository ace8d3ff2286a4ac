#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace regbf::cli {

struct Check {
  std::string name;
  bool passed{false};
  std::string detail;
};

struct CriterionResult {
  int id{0};
  std::string title;
  double budget_seconds{0.0};
  double seconds{0.0};
  bool skipped{false};
  std::vector<Check> checks;

  bool passed() const;
  std::vector<std::string> failed_checks() const;
};

struct VerifyOptions {
  // Algebraic checks only; runs criteria 1, 2, 3, 10 and the closed-form parts of the others.
  bool fast{false};
  // Multiplies beta in the analytic side of the Hopf agreement (fault injection).
  double corrupt_beta{1.0};
  // Pseudo-random rather than Halton sample points for the transform round-trip.
  bool random_points{false};
  std::uint64_t seed{1};
  // Subset of criteria to run; empty runs all.
  std::vector<int> only;
};

using CriterionFn = CriterionResult (*)(const VerifyOptions&);

struct CriterionInfo {
  int id;
  const char* title;
  double budget_seconds;
  CriterionFn run;
};

const std::vector<CriterionInfo>& criteria();

// Runs the selected criteria in order, calling on_done after each.
std::vector<CriterionResult> run_verify(const VerifyOptions& opts,
                                        const std::function<void(const CriterionResult&)>& on_done = {});

// One line: "PASS  3  BT identity  (0.01 s / 1 s)" followed by failing check names.
std::string format_line(const CriterionResult& r);

nlohmann::json to_json(const CriterionResult& r);

}  // namespace regbf::cli
