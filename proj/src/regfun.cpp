#include "regbf/regfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "regbf/errors.hpp"
#include "regbf/expression.hpp"

namespace regbf {

namespace {

// 1 - phi for the sqrt sigmoid without cancellation at large |s|.
double sqrt_sigmoid_upper(double s) {
  if (s <= 0.0) return 1.0 - 0.5 * (1.0 + s / std::sqrt(s * s + 1.0));
  const double r = std::hypot(s, 1.0);
  return 0.5 / (r * (r + s));
}

double sqrt_sigmoid_eval(double s) {
  if (s >= 0.0) return 1.0 - sqrt_sigmoid_upper(s);
  return sqrt_sigmoid_upper(-s);
}

double arctan_upper(double s) {
  if (s <= 0.0) return 0.5 - std::atan(s) / M_PI;
  return std::atan(1.0 / s) / M_PI;
}

double arctan_eval(double s) {
  if (s >= 0.0) return 1.0 - arctan_upper(s);
  return arctan_upper(-s);
}

}  // namespace

double RegularizationFunction::plus_tail(double u) const {
  if (u < 0.0) throw DomainError("plus_tail requires u >= 0");
  if (u == 0.0) return beta;
  return complement(1.0 / u) / std::pow(u, k);
}

RegularizationFunction make_builtin(std::string_view name) {
  RegularizationFunction r;
  r.name = std::string(name);
  r.odd = true;
  if (name == "sqrt_sigmoid") {
    r.k = 2;
    r.beta = 0.25;
    r.eval = sqrt_sigmoid_eval;
    r.complement = sqrt_sigmoid_upper;
    r.deriv = [](double s) {
      const double q = s * s + 1.0;
      return 0.5 / (q * std::sqrt(q));
    };
    return r;
  }
  if (name == "arctan_sigmoid") {
    r.k = 1;
    r.beta = 1.0 / M_PI;
    r.eval = arctan_eval;
    r.complement = arctan_upper;
    r.deriv = [](double s) { return 1.0 / (M_PI * (1.0 + s * s)); };
    return r;
  }
  throw ConfigError("unknown regularization '" + std::string(name) +
                    "' (expected sqrt_sigmoid or arctan_sigmoid)");
}

RegularizationFunction make_expression(std::string_view expr, int k, double beta, bool odd) {
  if (k < 1) throw ConfigError("regularization k must be a positive integer");
  if (!(beta > 0.0)) throw ConfigError("regularization beta must be positive");
  const Expression e = Expression::parse(expr, {"s"});
  RegularizationFunction r;
  r.name = "expr:" + std::string(expr);
  r.k = k;
  r.beta = beta;
  r.odd = odd;
  r.eval = [e](double s) { return e.eval(s); };
  r.deriv = [e](double s) { return e.eval_with_derivative(s).second; };
  r.complement = [e](double s) { return 1.0 - e.eval(s); };
  return r;
}

std::vector<double> sample_grid(const SamplingSpec& grid) {
  std::vector<double> pos;
  const double decades = std::log10(grid.s_max / grid.log_min);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * grid.points_per_decade)) + 1);
  for (int i = 0; i < n; ++i) {
    pos.push_back(grid.log_min * std::pow(10.0, decades * i / (n - 1)));
  }
  std::vector<double> all;
  for (double s : pos) {
    all.push_back(s);
    all.push_back(-s);
  }
  for (int i = 0; i < grid.core_points; ++i) {
    all.push_back(-grid.core_half_width + 2.0 * grid.core_half_width * i / (grid.core_points - 1));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

ValidationReport validate_regularization(const RegularizationFunction& reg, const SamplingSpec& grid) {
  if (grid.s_max < 1e6 || grid.core_half_width < 10.0) {
    throw ConfigError("sampling grid must cover |s| <= 1e6 and the core [-10, 10]");
  }
  ValidationReport rep;
  rep.name = reg.name;
  const auto samples = sample_grid(grid);

  rep.min_derivative = std::numeric_limits<double>::infinity();
  for (double s : samples) {
    const double d = reg.deriv(s);
    rep.min_derivative = std::min(rep.min_derivative, d);
    if (!(d > 0.0)) rep.monotonicity_violations.push_back(s);
  }
  if (!rep.monotonicity_violations.empty()) {
    std::ostringstream os;
    os << "monotonicity violated at " << rep.monotonicity_violations.size() << " sample(s), first s = "
       << rep.monotonicity_violations.front();
    rep.failures.push_back(os.str());
  }

  rep.upper_limit_residual = std::abs(reg.eval(grid.s_max) - 1.0);
  rep.lower_limit_residual = std::abs(reg.eval(-grid.s_max));
  const double limit_tol = std::max(1e-6, 2.0 * reg.beta * std::pow(grid.s_max, -reg.k));
  if (!(rep.upper_limit_residual <= limit_tol) || !(rep.lower_limit_residual <= limit_tol)) {
    rep.failures.push_back("boundary limits not reached at |s| = s_max");
  }

  // Log-log regression of 1 - phi over the tail window.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  bool tail_positive = true;
  const int m = grid.tail_points;
  for (int i = 0; i < m; ++i) {
    const double s = grid.tail_lo * std::pow(grid.tail_hi / grid.tail_lo, static_cast<double>(i) / (m - 1));
    const double t = reg.complement(s);
    if (!(t > 0.0) || !std::isfinite(t)) {
      tail_positive = false;
      break;
    }
    const double lx = std::log(s), ly = std::log(t);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  if (tail_positive) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    rep.k_fit = -slope;
    rep.beta_fit = std::exp(intercept);
  } else {
    rep.k_fit = std::numeric_limits<double>::infinity();
    rep.beta_fit = 0.0;
  }
  rep.tail_exponent_ok = std::abs(rep.k_fit - reg.k) <= 0.05;
  rep.tail_coefficient_ok = std::abs(rep.beta_fit / reg.beta - 1.0) <= 0.05;
  if (!rep.tail_exponent_ok) {
    std::ostringstream os;
    os << "tail exponent mismatch: fitted k = " << rep.k_fit << ", declared k = " << reg.k;
    rep.failures.push_back(os.str());
  } else if (!rep.tail_coefficient_ok) {
    std::ostringstream os;
    os << "tail coefficient mismatch: fitted beta = " << rep.beta_fit << ", declared beta = " << reg.beta;
    rep.failures.push_back(os.str());
  }

  if (reg.odd) {
    rep.odd_checked = true;
    for (double s : samples) {
      if (s < 0.0) continue;
      rep.odd_residual = std::max(rep.odd_residual, std::abs(reg.eval(s) + reg.eval(-s) - 1.0));
    }
    if (!(rep.odd_residual <= 1e-12)) rep.failures.push_back("declared odd symmetry violated");
  }
  return rep;
}

}  // namespace regbf
