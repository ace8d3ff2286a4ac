#include "regbf/numerics.hpp"

#include <algorithm>

#include <boost/math/statistics/linear_regression.hpp>

namespace regbf {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw NumericalError("fit_line needs at least two points");
  LinearFit fit;
  const auto [c0, c1, r2] = boost::math::statistics::simple_ordinary_least_squares_with_R_squared(x, y);
  fit.intercept = c0;
  fit.slope = c1;
  fit.r_squared = r2;
  const std::size_t n = x.size();
  if (n > 2) {
    double mx = 0.0;
    for (double v : x) mx += v;
    mx /= static_cast<double>(n);
    double sxx = 0.0, sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      const double r = y[i] - (c0 + c1 * x[i]);
      sse += r * r;
    }
    fit.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

LinearFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

Newton2Result newton2(const std::function<Vec2(const Vec2&)>& F, const std::function<Mat2(const Vec2&)>& J,
                      Vec2 guess, double tol, int max_iter) {
  Newton2Result res;
  res.z = guess;
  Vec2 f = F(res.z);
  auto nrm = [](const Vec2& v) { return std::max(std::abs(v.x), std::abs(v.y)); };
  res.residual = nrm(f);
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    if (res.residual <= tol) {
      res.converged = true;
      return res;
    }
    Vec2 step;
    try {
      step = solve(J(res.z), -f);
    } catch (const NumericalError&) {
      return res;
    }
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec2 trial = res.z + lambda * step;
      const Vec2 ft = F(trial);
      const double rt = nrm(ft);
      if (std::isfinite(rt) && rt < res.residual * (1.0 - 1e-4 * lambda)) {
        res.z = trial;
        f = ft;
        res.residual = rt;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) {
      // Accept a full step when the residual is already at rounding level.
      const Vec2 trial = res.z + step;
      const Vec2 ft = F(trial);
      if (nrm(ft) <= tol) {
        res.z = trial;
        res.residual = nrm(ft);
        res.converged = true;
        res.iterations = it + 1;
      }
      return res;
    }
  }
  res.iterations = max_iter;
  res.converged = res.residual <= tol;
  return res;
}

Mat2 fd_jacobian(const std::function<Vec2(const Vec2&)>& F, const Vec2& z, double rel) {
  const double hx = rel * std::max(1.0, std::abs(z.x));
  const double hy = rel * std::max(1.0, std::abs(z.y));
  const Vec2 fxp = F({z.x + hx, z.y}), fxm = F({z.x - hx, z.y});
  const Vec2 fyp = F({z.x, z.y + hy}), fym = F({z.x, z.y - hy});
  return {(fxp.x - fxm.x) / (2 * hx), (fyp.x - fym.x) / (2 * hy), (fxp.y - fxm.y) / (2 * hx),
          (fyp.y - fym.y) / (2 * hy)};
}

}  // namespace regbf
