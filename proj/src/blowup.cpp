#include "regbf/blowup.hpp"

#include <cmath>
#include <string>

#include "regbf/errors.hpp"

namespace regbf::blowup {

void DesingParams::validate() const {
  if (k < 1) throw DomainError("desingularized system needs k >= 1");
  if (!(beta > 0.0)) throw DomainError("desingularized system needs beta > 0");
}

const char* to_string(ChartId c) {
  switch (c) {
    case ChartId::K1_cyl: return "K1_cyl";
    case ChartId::calK1: return "calK1";
    case ChartId::calK2: return "calK2";
    case ChartId::calK3: return "calK3";
    case ChartId::composite: return "composite";
  }
  return "?";
}

ChartPoint cyl_chart_forward(double x, double y, double eps) {
  if (!(y > 0.0)) throw OutOfChartError("chart K1 requires y > 0");
  if (eps < 0.0) throw OutOfChartError("chart K1 requires eps >= 0");
  return {ChartId::K1_cyl, {x, y, eps / y, 0.0}};
}

std::array<double, 3> cyl_chart_inverse(const ChartPoint& pt) {
  if (pt.chart != ChartId::K1_cyl) throw OutOfChartError("expected a K1_cyl point");
  const double x = pt.coords[0], r1 = pt.coords[1], e1 = pt.coords[2];
  if (r1 < 0.0 || e1 < 0.0) throw OutOfChartError("K1_cyl radial coordinates must be nonnegative");
  return {x, r1, r1 * e1};
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw OutOfChartError(what);
}

// Blow-down of a calK point to the K1_cyl coordinates (x, r, eps).
ChartPoint blow_down(const ChartPoint& pt, int k) {
  const double kk = k * (k + 1.0);
  const auto& c = pt.coords;
  switch (pt.chart) {
    case ChartId::calK1:
      require(c[2] >= 0.0, "calK1 requires rho1 >= 0");
      return {ChartId::K1_cyl, {std::pow(c[2], kk) * c[0], std::pow(c[2], 2 * kk) * c[1], std::pow(c[2], k + 1.0), 0}};
    case ChartId::calK2:
      require(c[2] >= 0.0 && c[1] >= 0.0, "calK2 requires rho2, eps2 >= 0");
      return {ChartId::K1_cyl, {std::pow(c[2], kk) * c[0], std::pow(c[2], 2 * kk), std::pow(c[2], k + 1.0) * c[1], 0}};
    case ChartId::calK3:
      require(c[2] >= 0.0 && c[1] >= 0.0 && c[0] >= 0.0, "calK3 requires rho3, eps3, r3 >= 0");
      return {ChartId::K1_cyl,
              {-std::pow(c[2], kk), std::pow(c[2], 2 * kk) * c[0], std::pow(c[2], k + 1.0) * c[1], 0}};
    default: throw OutOfChartError("blow-down expects a calK chart");
  }
}

ChartPoint blow_up(const ChartPoint& pt, ChartId target, int k) {
  const double kk = k * (k + 1.0);
  const double x = pt.coords[0], r = pt.coords[1], e = pt.coords[2];
  require(r >= 0.0 && e >= 0.0, "K1_cyl radial coordinates must be nonnegative");
  switch (target) {
    case ChartId::calK1: {
      require(e > 0.0, "calK1 requires eps1 > 0");
      const double rho = std::pow(e, 1.0 / (k + 1.0));
      return {ChartId::calK1, {x / std::pow(rho, kk), r / std::pow(rho, 2 * kk), rho, 0}};
    }
    case ChartId::calK2: {
      require(r > 0.0, "calK2 requires r1 > 0");
      const double rho = std::pow(r, 1.0 / (2 * kk));
      return {ChartId::calK2, {x / std::pow(rho, kk), e / std::pow(rho, k + 1.0), rho, 0}};
    }
    case ChartId::calK3: {
      require(x < 0.0, "calK3 requires x < 0");
      const double rho = std::pow(-x, 1.0 / kk);
      return {ChartId::calK3, {r / std::pow(rho, 2 * kk), e / std::pow(rho, k + 1.0), rho, 0}};
    }
    default: throw OutOfChartError("blow-up target must be a calK chart");
  }
}

ChartPoint transition(const ChartPoint& pt, ChartId target, int k) {
  const double kk = k * (k + 1.0);
  const auto& c = pt.coords;
  if (pt.chart == ChartId::calK2 && target == ChartId::calK1) {
    const double x2 = c[0], e2 = c[1], rho2 = c[2];
    require(e2 > 0.0, "kappa12 requires eps2 > 0");
    return {ChartId::calK1, {std::pow(e2, -k) * x2, std::pow(e2, -2.0 * k), std::pow(e2, 1.0 / (k + 1)) * rho2, 0}};
  }
  if (pt.chart == ChartId::calK1 && target == ChartId::calK2) {
    const double x1 = c[0], r1 = c[1], rho1 = c[2];
    require(r1 > 0.0, "kappa21 requires r1 > 0");
    return {ChartId::calK2, {x1 * std::pow(r1, -0.5), std::pow(r1, -1.0 / (2 * k)), rho1 * std::pow(r1, 1.0 / (2 * kk)), 0}};
  }
  if (pt.chart == ChartId::calK3 && target == ChartId::calK2) {
    const double r3 = c[0], e3 = c[1], rho3 = c[2];
    require(r3 > 0.0, "kappa23 requires r3 > 0");
    return {ChartId::calK2, {-std::pow(r3, -0.5), std::pow(r3, -1.0 / (2 * k)) * e3, std::pow(r3, 1.0 / (2 * kk)) * rho3, 0}};
  }
  if (pt.chart == ChartId::calK2 && target == ChartId::calK3) {
    const double x2 = c[0], e2 = c[1], rho2 = c[2];
    require(x2 < 0.0, "kappa32 requires x2 < 0");
    return {ChartId::calK3, {std::pow(x2, -2.0), e2 * std::pow(-x2, -1.0 / k), rho2 * std::pow(-x2, 1.0 / kk), 0}};
  }
  if (pt.chart == ChartId::calK1 && target == ChartId::calK3) {
    const double x1 = c[0], r1 = c[1], rho1 = c[2];
    require(x1 < 0.0, "kappa31 requires x1 < 0");
    return {ChartId::calK3, {std::pow(-x1, -2.0) * r1, std::pow(-x1, -1.0 / k), std::pow(-x1, 1.0 / kk) * rho1, 0}};
  }
  if (pt.chart == ChartId::calK3 && target == ChartId::calK1) {
    const double r3 = c[0], e3 = c[1], rho3 = c[2];
    require(e3 > 0.0, "kappa13 requires eps3 > 0");
    return {ChartId::calK1, {-std::pow(e3, -static_cast<double>(k)), r3 * std::pow(e3, -2.0 * k), rho3 * std::pow(e3, 1.0 / (k + 1)), 0}};
  }
  throw OutOfChartError("no transition between the requested charts");
}

}  // namespace

ChartPoint sphere_chart_transform(const ChartPoint& pt, ChartId target, int k) {
  if (k < 1) throw DomainError("k must be a positive integer");
  if (pt.chart == ChartId::composite || target == ChartId::composite) {
    throw OutOfChartError("composite chart is handled by composite_forward/inverse");
  }
  if (pt.chart == target) return pt;
  if (pt.chart == ChartId::K1_cyl) return blow_up(pt, target, k);
  if (target == ChartId::K1_cyl) return blow_down(pt, k);
  return transition(pt, target, k);
}

Original composite_forward(int k, double x1, double nu1, double rho1, double mu_hat) {
  if (k < 1) throw DomainError("k must be a positive integer");
  if (nu1 < 0.0 || rho1 < 0.0) throw OutOfChartError("composite chart requires nu1, rho1 >= 0");
  const double kk = k * (1.0 + k);
  const double n = std::pow(nu1, 2 * kk);
  Original o;
  o.x = n * std::pow(rho1, kk) * x1;
  o.y = n * std::pow(rho1, 2 * kk);
  o.eps = std::pow(nu1, 2.0 * (1 + k) * (1 + k)) * std::pow(rho1, (1.0 + k) * (1.0 + 2 * k));
  o.mu = mu_hat * n * std::pow(rho1, k * (1.0 + 2 * k));
  return o;
}

Composite composite_inverse(int k, double x, double y, double eps, double mu) {
  if (k < 1) throw DomainError("k must be a positive integer");
  if (!(y > 0.0) || !(eps > 0.0)) throw OutOfChartError("composite chart requires y > 0 and eps > 0");
  const double kk = k * (1.0 + k);
  const double a = std::pow(y, 1.0 / (2 * kk));
  Composite c;
  c.nu1 = std::pow(eps / std::pow(a, (1.0 + k) * (1.0 + 2 * k)), 1.0 / (1 + k));
  c.rho1 = a / c.nu1;
  c.x1 = x / (std::pow(c.nu1, 2 * kk) * std::pow(c.rho1, kk));
  c.mu_hat = mu / std::pow(eps, static_cast<double>(k) / (k + 1));
  return c;
}

Vec2 desing_field(const DesingParams& p, double x1, double rho1) {
  if (rho1 < 0.0) throw DomainError("rho1 must be nonnegative");
  const int k = p.k;
  const double kk = k * (1.0 + k);
  const double rk = std::pow(rho1, kk);
  const double dx = rk * ((p.tau - p.gamma) * p.beta + p.mu_hat * std::pow(rho1, k * k) + p.tau * x1 - p.delta * rk) +
                    k * x1 * (p.beta + x1);
  const double dr = rho1 * (p.beta + x1) / k;
  return {dx, dr};
}

Mat2 desing_jacobian(const DesingParams& p, double x1, double rho1) {
  if (rho1 < 0.0) throw DomainError("rho1 must be nonnegative");
  const int k = p.k;
  const double kk = k * (1.0 + k);
  const double rk = std::pow(rho1, kk);
  // d/drho of rho^kk * (c + mu_hat rho^k^2 + tau x1 - delta rho^kk).
  const double c0 = (p.tau - p.gamma) * p.beta + p.tau * x1;
  double drho = 0.0;
  if (rho1 > 0.0) {
    drho = kk * std::pow(rho1, kk - 1.0) * c0 +
           p.mu_hat * (kk + k * k) * std::pow(rho1, kk + k * k - 1.0) -
           p.delta * 2.0 * kk * std::pow(rho1, 2.0 * kk - 1.0);
  }
  return {rk * p.tau + k * (p.beta + 2.0 * x1), drho, rho1 / k, (p.beta + x1) / k};
}

std::array<double, 3> k1_cylinder_field(const normalform::NormalFormParams& p, const RegularizationFunction& reg,
                                        double x, double r1, double eps1, double mu) {
  if (r1 < 0.0 || eps1 < 0.0) throw OutOfChartError("chart K1 requires r1, eps1 >= 0");
  // P = eps1^k phi_plus(eps1) = 1 - phi(1/eps1).
  const double P = eps1 > 0.0 ? std::pow(eps1, reg.k) * reg.plus_tail(eps1) : 0.0;
  const double s = p.sign_lower;
  const double F = s * (p.tau - p.gamma) * P + (1.0 - P) * (mu + p.tau * x - p.delta * r1 + p.theta1(x, r1, mu));
  const double G = s * P + (1.0 - P) * (x + p.theta2(x, r1, mu));
  return {r1 * F, r1 * G, -eps1 * G};
}

double time_desing_factor(int k, double rho1) {
  if (rho1 < 0.0) throw DomainError("rho1 must be nonnegative");
  return std::pow(rho1, k * (1.0 + k));
}

Vec2 pushforward_desing(const normalform::NormalFormParams& p, const RegularizationFunction& reg, double x1,
                        double nu1, double rho1, double mu_hat) {
  const int k = reg.k;
  const Original o = composite_forward(k, x1, nu1, rho1, mu_hat);
  const Vec2 v = normalform::smooth_field(p, reg, o.x, o.y, o.mu, o.eps);
  const double kk = k * (1.0 + k);
  const double n = std::pow(nu1, 2 * kk) * std::pow(rho1, kk);
  const double ly = v.y / o.y;  // d ln y / dt
  const double dx1 = v.x / n + k * x1 * ly;
  const double drho = rho1 * ly / k;
  const double f = time_desing_factor(k, rho1);
  return {f * dx1, f * drho};
}

}  // namespace regbf::blowup
