#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "regbf/errors.hpp"
#include "regbf/types.hpp"

namespace regbf {

// Bracketed root of f on [a, b] to |b - a| <= xtol; requires a sign change.
template <class F>
double find_root(F&& f, double a, double b, double xtol = 1e-14) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0)) throw NumericalError("find_root: no sign change on bracket");
  std::uintmax_t iters = 200;
  auto tol = [xtol](double lo, double hi) { return std::abs(hi - lo) <= xtol; };
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (r.first + r.second);
}

// Sub-intervals of [lo, hi] (n uniform cells) on which f changes sign or vanishes at the left end.
template <class F>
std::vector<Interval> sign_change_brackets(F&& f, double lo, double hi, int n) {
  std::vector<Interval> out;
  double x0 = lo;
  double f0 = f(x0);
  for (int i = 1; i <= n; ++i) {
    const double x1 = lo + (hi - lo) * i / n;
    const double f1 = f(x1);
    if (std::isfinite(f0) && std::isfinite(f1) && ((f0 < 0.0) != (f1 < 0.0) || f0 == 0.0)) {
      out.push_back({x0, x1});
    }
    x0 = x1;
    f0 = f1;
  }
  return out;
}

struct LinearFit {
  double slope{0.0};
  double intercept{0.0};
  double r_squared{0.0};
  double slope_stderr{0.0};
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Log-log fit: y ~ C x^slope.
LinearFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct Newton2Result {
  Vec2 z;
  double residual{0.0};
  int iterations{0};
  bool converged{false};
};

// Damped Newton for F(z) = 0 with residual measured in the max norm.
Newton2Result newton2(const std::function<Vec2(const Vec2&)>& F, const std::function<Mat2(const Vec2&)>& J,
                      Vec2 guess, double tol = 1e-12, int max_iter = 50);

// Central-difference Jacobian with per-component relative steps.
Mat2 fd_jacobian(const std::function<Vec2(const Vec2&)>& F, const Vec2& z, double rel = 1e-7);

}  // namespace regbf
