#include "regbf/normalform.hpp"

#include <cmath>

#include "regbf/errors.hpp"
#include "regbf/numerics.hpp"

namespace regbf::normalform {

namespace {

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

double Poly3::operator()(double x, double y, double mu) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef * ipow(x, t.px) * ipow(y, t.py) * ipow(mu, t.pmu);
  return s;
}

double Poly3::dx(double x, double y, double mu) const {
  double s = 0.0;
  for (const auto& t : terms) {
    if (t.px > 0) s += t.coef * t.px * ipow(x, t.px - 1) * ipow(y, t.py) * ipow(mu, t.pmu);
  }
  return s;
}

double Poly3::dy(double x, double y, double mu) const {
  double s = 0.0;
  for (const auto& t : terms) {
    if (t.py > 0) s += t.coef * t.py * ipow(x, t.px) * ipow(y, t.py - 1) * ipow(mu, t.pmu);
  }
  return s;
}

double Poly3::dmu(double x, double y, double mu) const {
  double s = 0.0;
  for (const auto& t : terms) {
    if (t.pmu > 0) s += t.coef * t.pmu * ipow(x, t.px) * ipow(y, t.py) * ipow(mu, t.pmu - 1);
  }
  return s;
}

void NormalFormParams::validate() const {
  if (!(tau > 0.0)) throw ConfigError("normal form requires tau > 0");
  if (!(delta > 0.25 * tau * tau)) throw ConfigError("normal form requires delta > tau^2/4 (focus condition)");
  if (sign_lower != 1 && sign_lower != -1) throw ConfigError("sign_lower must be +1 or -1");
  for (const auto& t : theta1.terms) {
    if (t.px < 0 || t.py < 0 || t.pmu < 0 || t.px + t.py + t.pmu < 2) {
      throw ConfigError("theta1 admits only monomials of total degree >= 2");
    }
  }
  for (const auto& t : theta2.terms) {
    if (t.px < 0 || t.py < 0 || t.pmu < 0 || t.px + t.py + t.pmu < 2 || t.px + t.py == 0) {
      throw ConfigError("theta2 admits only monomials of total degree >= 2 containing x or y");
    }
  }
}

Vec2 upper_field(const NormalFormParams& p, double x, double y, double mu) {
  return {mu + p.tau * x - p.delta * y + p.theta1(x, y, mu), x + p.theta2(x, y, mu)};
}

Vec2 lower_field(const NormalFormParams& p) {
  const double s = p.sign_lower;
  return {s * (p.tau - p.gamma), s};
}

Vec2 smooth_field(const NormalFormParams& p, const RegularizationFunction& reg, double x, double y, double mu,
                  double eps) {
  const double s = y / eps;
  const double phi = reg.eval(s);
  const double one_minus = reg.complement(s);
  const Vec2 up = upper_field(p, x, y, mu);
  const Vec2 lo = lower_field(p);
  return {lo.x * one_minus + phi * up.x, lo.y * one_minus + phi * up.y};
}

Mat2 smooth_jacobian(const NormalFormParams& p, const RegularizationFunction& reg, double x, double y, double mu,
                     double eps) {
  const double s = y / eps;
  const double phi = reg.eval(s);
  const double dphi = reg.deriv(s) / eps;
  const Vec2 up = upper_field(p, x, y, mu);
  const Vec2 lo = lower_field(p);
  return {phi * (p.tau + p.theta1.dx(x, y, mu)), dphi * (up.x - lo.x) + phi * (-p.delta + p.theta1.dy(x, y, mu)),
          phi * (1.0 + p.theta2.dx(x, y, mu)), dphi * (up.y - lo.y) + phi * p.theta2.dy(x, y, mu)};
}

filippov::PwsSystem pws_limit(const NormalFormParams& p) {
  p.validate();
  filippov::PwsSystem sys;
  sys.name = "normalform";
  sys.zplus.value = [p](const Vec2& z, double mu) { return upper_field(p, z.x, z.y, mu); };
  sys.zplus.jacobian = [p](const Vec2& z, double mu) {
    return Mat2{p.tau + p.theta1.dx(z.x, z.y, mu), -p.delta + p.theta1.dy(z.x, z.y, mu), 1.0 + p.theta2.dx(z.x, z.y, mu),
                p.theta2.dy(z.x, z.y, mu)};
  };
  sys.zminus.value = [p](const Vec2&, double) { return lower_field(p); };
  sys.zminus.jacobian = [](const Vec2&, double) { return Mat2{}; };
  sys.domain = {-20.0, 20.0, -20.0, 20.0};
  return sys;
}

double filippov_field_nf(const NormalFormParams& p, double x, double mu) {
  const double t1 = p.theta1(x, 0.0, mu), t2 = p.theta2(x, 0.0, mu);
  const double denom = 1.0 - x - t2;
  if (std::abs(denom) < 1e-14) throw DegenerateError("Filippov field denominator vanishes");
  return (mu + p.gamma * x + t1 - (p.tau - p.gamma) * t2) / denom;
}

PwsEquilibria pws_equilibria(const NormalFormParams& p, double mu) {
  p.validate();
  PwsEquilibria out;
  if (mu > 0.0) {
    auto F = [&](const Vec2& z) { return upper_field(p, z.x, z.y, mu); };
    auto J = [&](const Vec2& z) {
      return Mat2{p.tau + p.theta1.dx(z.x, z.y, mu), -p.delta + p.theta1.dy(z.x, z.y, mu),
                  1.0 + p.theta2.dx(z.x, z.y, mu), p.theta2.dy(z.x, z.y, mu)};
    };
    const auto r = newton2(F, J, {0.0, mu / p.delta}, 1e-14, 50);
    if (r.converged) out.focus = r.z;
    else out.diagnostic += "focus Newton failed; ";
  }
  // Sliding equilibrium exists on the sliding side when x_s = -mu/gamma < 0 approximately.
  if (p.gamma != 0.0 && p.sign_lower > 0 && -mu / p.gamma < 0.0) {
    double x = -mu / p.gamma;
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      const double f = filippov_field_nf(p, x, mu);
      const double h = 1e-7 * std::max(1.0, std::abs(x));
      const double df = (filippov_field_nf(p, x + h, mu) - filippov_field_nf(p, x - h, mu)) / (2 * h);
      if (df == 0.0) break;
      const double dx = f / df;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) {
        ok = true;
        break;
      }
    }
    if (ok) out.sliding_eq = Vec2{x, 0.0};
    else out.diagnostic += "sliding-equilibrium Newton failed; ";
  }
  return out;
}

filippov::FoldPoint upper_fold(const NormalFormParams& p, double mu) {
  const auto sys = pws_limit(p);
  const double w = std::max(0.5, 4.0 * std::abs(mu));
  const auto folds = filippov::find_folds(sys, {-w, w}, mu, 4001);
  const filippov::FoldPoint* best = nullptr;
  for (const auto& f : folds) {
    if (f.side != filippov::Side::Plus) continue;
    if (!best || std::abs(f.x) < std::abs(best->x)) best = &f;
  }
  if (!best) throw DetectionError("no fold of the upper field near the origin");
  return *best;
}

filippov::PwsCycle build_pws_cycle(const NormalFormParams& p, double mu, double spacing) {
  if (!(mu > 0.0)) throw DomainError("PWS cycles exist only for mu > 0");
  const auto sys = pws_limit(p);
  const auto fold = upper_fold(p, mu);
  return filippov::construct_pws_cycle(sys, mu, fold, spacing, 1e3);
}

dynamics::PlanarField bind_field(const NormalFormParams& p, const RegularizationFunction& reg, double mu, double eps) {
  return [p, reg, mu, eps](const Vec2& z) { return smooth_field(p, reg, z.x, z.y, mu, eps); };
}

dynamics::PlanarJacobian bind_jacobian(const NormalFormParams& p, const RegularizationFunction& reg, double mu,
                                       double eps) {
  return [p, reg, mu, eps](const Vec2& z) { return smooth_jacobian(p, reg, z.x, z.y, mu, eps); };
}

}  // namespace regbf::normalform
