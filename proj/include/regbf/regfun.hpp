#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace regbf {

// Smooth monotone switch phi with phi(-inf) = 0, phi(+inf) = 1 and tail
// 1 - phi(s) ~ beta * s^-k as s -> +inf.
struct RegularizationFunction {
  std::string name;
  int k{1};
  double beta{1.0};
  // phi - 1/2 declared odd.
  bool odd{false};
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  // 1 - phi(s), accurate for large positive s.
  std::function<double(double)> complement;

  double operator()(double s) const { return eval(s); }

  // phi_plus(u) = (1 - phi(1/u)) / u^k, equal to beta at u = 0.
  double plus_tail(double u) const;
};

// sqrt_sigmoid: (1 + s/sqrt(s^2+1))/2, (k, beta) = (2, 1/4).
// arctan_sigmoid: 1/2 + atan(s)/pi, (k, beta) = (1, 1/pi).
RegularizationFunction make_builtin(std::string_view name);

// User function given as an expression in s.
RegularizationFunction make_expression(std::string_view expr, int k, double beta, bool odd = false);

struct SamplingSpec {
  double s_max{1e6};
  int points_per_decade{25};
  double log_min{1e-3};
  double core_half_width{10.0};
  int core_points{2001};
  double tail_lo{1e2};
  double tail_hi{1e6};
  int tail_points{41};
};

struct ValidationReport {
  std::string name;
  double min_derivative{0.0};
  std::vector<double> monotonicity_violations;
  double upper_limit_residual{0.0};
  double lower_limit_residual{0.0};
  double k_fit{0.0};
  double beta_fit{0.0};
  bool tail_exponent_ok{false};
  bool tail_coefficient_ok{false};
  bool odd_checked{false};
  double odd_residual{0.0};
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

ValidationReport validate_regularization(const RegularizationFunction& reg, const SamplingSpec& grid = {});

// Symmetric evaluation grid used by validation and property tests.
std::vector<double> sample_grid(const SamplingSpec& grid);

}  // namespace regbf
