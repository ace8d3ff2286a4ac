#include "regbf/applications.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "regbf/errors.hpp"
#include "regbf/numerics.hpp"
#include "regbf/parallel.hpp"

namespace regbf::applications {

void GauseParams::validate() const {
  if (!(r > 0.0) || !(lambda > 0.0) || !(h >= 0.0) || !(m > 0.0) || !(e_tilde > 0.0)) {
    throw ConfigError("Gause parameters r, lambda, m, e_tilde must be positive and h nonnegative");
  }
  if (!(e_tilde - h * m > 0.0)) throw ConfigError("Gause model requires e_tilde - h m > 0");
  if (!(h < gause_h_star(*this))) throw ConfigError("Gause model requires h < h_star (low handling time)");
}

double gause_response(const GauseParams& p, double y) {
  const double u = p.lambda * (y + p.mu);
  return u / (1.0 + p.h * u);
}

Vec2 gause_field(const GauseParams& p, const RegularizationFunction& reg, double x, double y, double eps) {
  const double phi = reg(y / eps);
  const double w = gause_response(p, y);
  return {x * (-p.m + phi * p.e_tilde * w), p.r * (p.mu + y) - phi * x * w};
}

Mat2 gause_jacobian(const GauseParams& p, const RegularizationFunction& reg, double x, double y, double eps) {
  const double s = y / eps;
  const double phi = reg(s);
  const double phi_y = reg.deriv(s) / eps;
  const double w = gause_response(p, y);
  const double den = 1.0 + p.h * p.lambda * (y + p.mu);
  const double w_y = p.lambda / (den * den);
  const double pw_y = phi_y * w + phi * w_y;
  return {-p.m + phi * p.e_tilde * w, x * p.e_tilde * pw_y, -phi * w, p.r - x * pw_y};
}

filippov::PwsSystem gause_pws(const GauseParams& p) {
  p.validate();
  filippov::PwsSystem sys;
  sys.name = "gause";
  auto w_of = [p](double y, double mu) {
    const double u = p.lambda * (y + mu);
    return u / (1.0 + p.h * u);
  };
  auto w_y = [p](double y, double mu) {
    const double den = 1.0 + p.h * p.lambda * (y + mu);
    return p.lambda / (den * den);
  };
  sys.zplus.value = [p, w_of](const Vec2& z, double mu) {
    const double w = w_of(z.y, mu);
    return Vec2{z.x * (-p.m + p.e_tilde * w), p.r * (mu + z.y) - z.x * w};
  };
  sys.zplus.jacobian = [p, w_of, w_y](const Vec2& z, double mu) {
    const double w = w_of(z.y, mu);
    const double wy = w_y(z.y, mu);
    return Mat2{-p.m + p.e_tilde * w, z.x * p.e_tilde * wy, -w, p.r - z.x * wy};
  };
  sys.zminus.value = [p](const Vec2& z, double mu) { return Vec2{-p.m * z.x, p.r * (mu + z.y)}; };
  sys.zminus.jacobian = [p](const Vec2&, double) { return Mat2{-p.m, 0.0, 0.0, p.r}; };
  sys.domain = {0.01, 5.0, -1.0, 5.0};
  return sys;
}

double gause_mu_bf(const GauseParams& p) {
  const double d = p.e_tilde - p.h * p.m;
  if (!(d > 0.0)) throw DomainError("mu_bf requires e_tilde - h m > 0");
  return p.m / (p.lambda * d);
}

double gause_h_star(const GauseParams& p) {
  return (2.0 * p.e_tilde / p.r) * (-1.0 + std::sqrt(1.0 + p.r / p.m));
}

Vec2 gause_equilibrium(const GauseParams& p) {
  const double d = p.e_tilde - p.h * p.m;
  if (!(d > 0.0)) throw DomainError("equilibrium requires e_tilde - h m > 0");
  return {p.e_tilde * p.r / (p.lambda * d), -p.mu + p.m / (p.lambda * d)};
}

GauseOriginal gause_desing_transform(const GauseParams& p, int k, double x1, double nu1, double rho1,
                                     double mu_hat) {
  if (k < 1) throw ConfigError("k must be a positive integer");
  if (nu1 < 0.0 || rho1 < 0.0) throw DomainError("nu1 and rho1 must be nonnegative");
  const double kk = k * (1.0 + k);
  const double n = std::pow(nu1, 2.0 * kk);
  const double d = p.e_tilde - p.h * p.m;
  GauseOriginal o;
  o.x = p.e_tilde * p.r / (p.lambda * d) +
        n * std::pow(rho1, kk) * (p.h * p.r * mu_hat * std::pow(rho1, k * k) + x1);
  o.y = n * std::pow(rho1, 2.0 * kk);
  o.eps = std::pow(nu1, 2.0 * (1.0 + k) * (1.0 + k)) * std::pow(rho1, (1.0 + k) * (1.0 + 2.0 * k));
  o.mu = gause_mu_bf(p) + mu_hat * n * std::pow(rho1, k * (1.0 + 2.0 * k));
  return o;
}

bifurcation::HopfLocation gause_hopf(const GauseParams& p, const RegularizationFunction& reg, double eps) {
  p.validate();
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double mu_bf = gause_mu_bf(p);
  bifurcation::ParamFamily fam;
  fam.field = [&](const Vec2& z, double mu) {
    GauseParams q = p;
    q.mu = mu;
    return gause_field(q, reg, z.x, z.y, eps);
  };
  fam.jacobian = [&](const Vec2& z, double mu) {
    GauseParams q = p;
    q.mu = mu;
    return gause_jacobian(q, reg, z.x, z.y, eps);
  };
  fam.residual_tol = [](double) { return 1e-13; };
  const double start = mu_bf - 0.3;
  GauseParams q = p;
  q.mu = start;
  const auto grid = bifurcation::clustered_grid(start, mu_bf, mu_bf + 0.3, 40, 1e-12);
  return bifurcation::locate_hopf(fam, grid, gause_equilibrium(q));
}

namespace {

dynamics::PlanarField gause_bound(const GauseParams& p, const RegularizationFunction& reg, double eps) {
  return [p, reg, eps](const Vec2& z) { return gause_field(p, reg, z.x, z.y, eps); };
}

std::optional<Vec2> gause_smooth_equilibrium(const GauseParams& p, const RegularizationFunction& reg, double eps) {
  auto F = [&](const Vec2& z) { return gause_field(p, reg, z.x, z.y, eps); };
  auto J = [&](const Vec2& z) { return gause_jacobian(p, reg, z.x, z.y, eps); };
  Vec2 guess = gause_equilibrium(p);
  guess.y = std::max(guess.y, 0.0);
  const auto r = newton2(F, J, guess, 1e-13, 100);
  if (!r.converged) return std::nullopt;
  return r.z;
}

// Halton radical inverse.
double halton(int index, int base) {
  double f = 1.0;
  double r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

}  // namespace

dynamics::Section gause_section(const GauseParams& p) {
  const Vec2 e = gause_equilibrium(p);
  return {dynamics::SectionKind::Vertical, e.x, dynamics::Direction::Increasing,
          {std::max(e.y, 0.0), std::numeric_limits<double>::infinity()}};
}

dynamics::CycleResult gause_cycle(const GauseParams& p, const RegularizationFunction& reg, double eps,
                                  std::optional<Vec2> guess) {
  p.validate();
  dynamics::Section sec = gause_section(p);
  if (const auto e = gause_smooth_equilibrium(p, reg, eps)) {
    sec.level = e->x;
    sec.window.lo = e->y;
  }
  const Vec2 g = guess.value_or(Vec2{sec.level, sec.window.lo + 0.5});
  return dynamics::find_limit_cycle(gause_bound(p, reg, eps), sec, g, dynamics::cycle_config(eps));
}

MultiStartResult gause_multistart(const GauseParams& p, const RegularizationFunction& reg, double eps, int count,
                                  const Box& box) {
  MultiStartResult out;
  for (int i = 1; i <= count; ++i) {
    out.starts.push_back({box.x_min + (box.x_max - box.x_min) * halton(i, 2),
                          box.y_min + (box.y_max - box.y_min) * halton(i, 3)});
  }
  using Outcome = std::pair<std::optional<Vec2>, std::string>;
  const auto results = parallel_map(out.starts.size(), [&](std::size_t i) -> Outcome {
    const auto r = gause_cycle(p, reg, eps, out.starts[i]);
    if (r.cycle && r.cycle->stable) return {r.cycle->anchor, "converged"};
    if (r.cycle) return {std::nullopt, "unstable cycle"};
    if (gause_escapes(p, reg, eps, out.starts[i])) return {std::nullopt, "unbounded: prey escapes predation"};
    return {std::nullopt, r.diagnostic};
  });
  for (const auto& [a, d] : results) {
    out.anchors.push_back(a);
    out.diagnostics.push_back(d);
  }
  out.all_converged = std::all_of(out.anchors.begin(), out.anchors.end(), [](const auto& a) { return a.has_value(); });
  for (const auto& a : out.anchors) {
    for (const auto& b : out.anchors) {
      if (a && b) out.max_anchor_spread = std::max(out.max_anchor_spread, dist(*a, *b));
    }
  }
  return out;
}

bool gause_escapes(const GauseParams& p, const RegularizationFunction& reg, double eps, Vec2 start,
                   double t_end, double bound) {
  auto cfg = dynamics::cycle_config(eps);
  cfg.t_budget = t_end;
  const auto field = gause_bound(p, reg, eps);
  const auto escaped = [bound](const dynamics::Trajectory& tr) {
    return std::any_of(tr.z.begin(), tr.z.end(), [bound](const Vec2& z) { return !(norm(z) <= bound); });
  };
  try {
    return escaped(dynamics::integrate(field, start, {0.0, t_end}, cfg));
  } catch (const dynamics::BudgetError& e) {
    return escaped(e.partial());
  } catch (const NumericalError&) {
    return false;
  }
}

EquilibriumCheck gause_equilibrium_check(const GauseParams& p, const RegularizationFunction& reg, double eps,
                                         double t_end) {
  p.validate();
  EquilibriumCheck out;
  const auto e = gause_smooth_equilibrium(p, reg, eps);
  if (!e) throw DetectionError("Gause: smooth equilibrium not found");
  out.equilibrium = *e;
  out.eigenvalues = eigenvalues(gause_jacobian(p, reg, e->x, e->y, eps));
  const auto field = gause_bound(p, reg, eps);
  auto cfg = dynamics::cycle_config(eps);
  cfg.t_budget = t_end;
  dynamics::IntegrateOptions opts;
  opts.record = true;
  for (const Vec2 d : {Vec2{0.2, 0.2}, Vec2{-0.2, 0.2}, Vec2{0.2, -0.2}, Vec2{-0.2, -0.2}}) {
    const Vec2 z0 = *e + d;
    out.starts.push_back(z0);
    const auto tr = dynamics::integrate(field, z0, {0.0, t_end}, cfg, {}, opts);
    out.final_distance = std::max(out.final_distance, dist(tr.z.back(), *e));
  }
  out.attracting = out.eigenvalues.max_real() < 0.0 && out.final_distance < 1e-6;
  return out;
}

void StickSlipParams::validate() const {
  if (!(mu_s > 0.0) || !(mu_m > 0.0) || !(v_m > 0.0)) throw ConfigError("mu_s, mu_m, v_m must be positive");
  if (!(mu_s > mu_m)) throw ConfigError("Stribeck law requires mu_s > mu_m");
  for (int i = 0; i < 200; ++i) {
    const double y = v_m * i / 200.0;
    const double d = stribeck_deriv(*this, y);
    if (!(stribeck(*this, y) > 0.0) || !(d > -2.0 && d < 0.0)) {
      std::ostringstream os;
      os << "Stribeck conditions violated at y = " << y;
      throw ConfigError(os.str());
    }
  }
}

double stribeck(const StickSlipParams& p, double y) {
  const double c = p.mu_s - p.mu_m;
  return p.mu_s - (3.0 * c / (2.0 * p.v_m)) * y + (c / (2.0 * p.v_m * p.v_m * p.v_m)) * y * y * y;
}

double stribeck_deriv(const StickSlipParams& p, double y) {
  const double c = p.mu_s - p.mu_m;
  return -(3.0 * c / (2.0 * p.v_m)) + (3.0 * c / (2.0 * p.v_m * p.v_m * p.v_m)) * y * y;
}

StickSlipModel::StickSlipModel(StickSlipParams p, RegularizationFunction reg) : p_(p), reg_(std::move(reg)) {
  p_.validate();
  if (!reg_.odd) throw ConfigError("stick-slip requires a regularization with odd phi - 1/2");
  for (int i = 0; i <= 400; ++i) {
    const double s = -100.0 + 0.5 * i;
    const double res = std::abs(reg_(s) + reg_(-s) - 1.0);
    if (res > 1e-12) {
      std::ostringstream os;
      os << "regularization " << reg_.name << " is not odd about 1/2 at s = " << s;
      throw ConfigError(os.str());
    }
  }
}

double StickSlipModel::friction(double y, double eps) const {
  const double s = y / eps;
  return stribeck(p_, y) * reg_(s) - stribeck(p_, -y) * reg_.complement(s);
}

double StickSlipModel::friction_dy(double y, double eps) const {
  const double s = y / eps;
  const double phi = reg_(s);
  return stribeck_deriv(p_, y) * phi + stribeck_deriv(p_, -y) * reg_.complement(s) +
         (stribeck(p_, y) + stribeck(p_, -y)) * reg_.deriv(s) / eps;
}

Vec2 StickSlipModel::field(double x, double y, double alpha, double eps) const {
  return {y - alpha, -x - friction(y, eps)};
}

Mat2 StickSlipModel::jacobian(double, double y, double, double eps) const {
  return {0.0, 1.0, -1.0, -friction_dy(y, eps)};
}

filippov::PwsSystem stickslip_pws(const StickSlipParams& p) {
  p.validate();
  filippov::PwsSystem sys;
  sys.name = "stickslip";
  sys.zplus.value = [p](const Vec2& z, double a) { return Vec2{z.y - a, -z.x - stribeck(p, z.y)}; };
  sys.zplus.jacobian = [p](const Vec2& z, double) { return Mat2{0.0, 1.0, -1.0, -stribeck_deriv(p, z.y)}; };
  sys.zminus.value = [p](const Vec2& z, double a) { return Vec2{z.y - a, -z.x + stribeck(p, -z.y)}; };
  sys.zminus.jacobian = [p](const Vec2& z, double) { return Mat2{0.0, 1.0, -1.0, -stribeck_deriv(p, -z.y)}; };
  sys.domain = {-5.0, 5.0, -5.0, 5.0};
  return sys;
}

double stickslip_alpha_ah_prefactor(const StickSlipParams& p, const RegularizationFunction& reg) {
  const double d0 = stribeck_deriv(p, 0.0);
  return std::pow(2.0 * reg.beta * p.mu_s * reg.k / (-d0), 1.0 / (1.0 + reg.k));
}

AlphaAh stickslip_alpha_ah(const StickSlipModel& model, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const auto& reg = model.reg();
  AlphaAh out;
  out.analytic = stickslip_alpha_ah_prefactor(model.params(), reg) * std::pow(eps, reg.k / (reg.k + 1.0));
  bifurcation::ParamFamily fam;
  fam.field = [&](const Vec2& z, double a) { return model.field(z.x, z.y, a, eps); };
  fam.jacobian = [&](const Vec2& z, double a) { return model.jacobian(z.x, z.y, a, eps); };
  fam.residual_tol = [](double) { return 1e-13; };
  const double a0 = 0.5;
  const auto grid = bifurcation::clustered_grid(a0, 0.0, 0.0, 40, 1e-12);
  out.numeric = bifurcation::locate_hopf(fam, grid, {-model.friction(a0, eps), a0}).param;
  return out;
}

Vec2 stickslip_desing_field(const StickSlipParams& p, int k, double beta, double x1, double rho1, double alpha_hat) {
  if (k < 1) throw ConfigError("k must be a positive integer");
  if (rho1 < 0.0) throw DomainError("rho1 must be nonnegative");
  const double d0 = stribeck_deriv(p, 0.0);
  const double g = x1 - 2.0 * p.mu_s * beta + d0 * std::pow(rho1, k * (1.0 + k));
  return {std::pow(rho1, k * (1.0 + 2.0 * k)) * (std::pow(rho1, k) - alpha_hat) - k * x1 * g, -rho1 * g / k};
}

dynamics::Section stickslip_section(const StickSlipParams& p, double alpha) {
  // Vertical line through the upper focus (-mu_+(alpha), alpha) for alpha > 0, mirrored for alpha < 0.
  if (alpha > 0.0) {
    return {dynamics::SectionKind::Vertical, -stribeck(p, alpha), dynamics::Direction::Increasing,
            {alpha, std::numeric_limits<double>::infinity()}};
  }
  if (alpha < 0.0) {
    return {dynamics::SectionKind::Vertical, stribeck(p, -alpha), dynamics::Direction::Decreasing,
            {-std::numeric_limits<double>::infinity(), alpha}};
  }
  throw DomainError("stick-slip cycles need alpha != 0");
}

dynamics::CycleResult stickslip_cycle(const StickSlipModel& model, double alpha, double eps) {
  dynamics::Section sec = stickslip_section(model.params(), alpha);
  sec.level = -model.friction(alpha, eps);
  const double sgn = alpha > 0.0 ? 1.0 : -1.0;
  dynamics::PlanarField f = [&model, alpha, eps](const Vec2& z) { return model.field(z.x, z.y, alpha, eps); };
  return dynamics::find_limit_cycle(f, sec, {sec.level, alpha + sgn * 0.3}, dynamics::cycle_config(eps));
}

CreepReport creep_study(const StickSlipModel& model, double eps, double a) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const auto& p = model.params();
  const auto& reg = model.reg();
  const double alpha = eps * a;
  CreepReport rep;
  rep.eps = eps;
  rep.a = a;
  auto Fe = [&](const Vec2& z) { return model.field(z.x, z.y, alpha, eps); };
  auto Je = [&](const Vec2& z) { return model.jacobian(z.x, z.y, alpha, eps); };
  const auto eq = newton2(Fe, Je, {-model.friction(alpha, eps), alpha}, 1e-14, 100);
  if (!eq.converged) throw NumericalError("creep equilibrium not found");
  rep.equilibrium = eq.z;
  rep.equilibrium_y_over_alpha = eq.z.y / alpha;

  const double d0 = stribeck_deriv(p, 0.0);
  auto manifold = [&](double y) {
    const double Y = y / eps;
    return p.mu_s * (1.0 - 2.0 * reg(Y)) - eps * d0 * Y;
  };
  auto literal = [&](double y) {
    const double Y = y / eps;
    return p.mu_s * (1.0 - 2.0 * reg(Y)) - eps * a * Y;
  };
  const double r0 = 0.5 * p.mu_s;
  for (int i = 0; i < 4; ++i) {
    const double ang = 0.25 * M_PI + 0.5 * M_PI * i;
    rep.starts.push_back({r0 * std::cos(ang), r0 * std::sin(ang)});
  }
  dynamics::IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-13;
  cfg.layer_eps = eps;
  const double t_end = 4.0 / eps;
  cfg.t_budget = 2.0 * t_end;
  dynamics::PlanarField f = [&](const Vec2& z) { return model.field(z.x, z.y, alpha, eps); };
  struct PerStart {
    double resid, lit, halving;
  };
  const auto rows = parallel_map(rep.starts.size(), [&](std::size_t i) {
    dynamics::IntegrateOptions io;
    io.record = true;
    const auto tr = dynamics::integrate(f, rep.starts[i], {0.0, t_end}, cfg, {}, io);
    const double t_cut = 0.2 * t_end;
    PerStart ps{0.0, 0.0, std::numeric_limits<double>::quiet_NaN()};
    double d_cut = -1.0;
    double t_start = 0.0;
    for (std::size_t j = 0; j < tr.z.size(); ++j) {
      if (tr.t[j] < t_cut) continue;
      const Vec2& z = tr.z[j];
      ps.resid = std::max(ps.resid, std::abs(z.x - manifold(z.y)));
      ps.lit = std::max(ps.lit, std::abs(z.x - literal(z.y)));
      const double d = dist(z, rep.equilibrium);
      if (d_cut < 0.0) {
        d_cut = d;
        t_start = tr.t[j];
      } else if (std::isnan(ps.halving) && d <= 0.5 * d_cut) {
        ps.halving = tr.t[j] - t_start;
      }
    }
    return ps;
  });
  double sum = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    rep.manifold_residual = std::max(rep.manifold_residual, r.resid);
    rep.literal_residual = std::max(rep.literal_residual, r.lit);
    if (!std::isnan(r.halving)) {
      sum += r.halving;
      ++n;
    }
  }
  rep.halving_time = n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace regbf::applications
