#include "cli/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "regbf/applications.hpp"
#include "regbf/bifurcation.hpp"
#include "regbf/blowup.hpp"
#include "regbf/dynamics.hpp"
#include "regbf/errors.hpp"
#include "regbf/filippov.hpp"
#include "regbf/normalform.hpp"
#include "regbf/numerics.hpp"
#include "regbf/regfun.hpp"

namespace regbf::cli {

namespace {

namespace bf = regbf::bifurcation;
namespace app = regbf::applications;
namespace dyn = regbf::dynamics;
namespace fl = regbf::filippov;

const std::vector<double> kEpsLadder{1e-3, 3e-4, 1e-4, 3e-5};

void add(CriterionResult& r, std::string name, bool ok, std::string detail) {
  r.checks.push_back({std::move(name), ok, std::move(detail)});
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

// Points in [0, 1)^4: Halton bases 2, 3, 5, 7, or mt19937_64 uniforms when random points are requested.
std::vector<std::array<double, 4>> unit_points(const VerifyOptions& o, int n) {
  std::vector<std::array<double, 4>> out(n);
  std::mt19937_64 gen(o.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < 4; ++d) {
      static constexpr int bases[] = {2, 3, 5, 7};
      out[i][d] = o.random_points ? u(gen) : halton(i + 1, bases[d]);
    }
  }
  return out;
}

// ---------------------------------------------------------------- 1-3: desingularized curves

CriterionResult hopf_agreement(const VerifyOptions& o) {
  CriterionResult r;
  double worst = 0.0;
  int worst_k = 0;
  double worst_g = 0.0;
  int n = 0;
  for (int k = 1; k <= 3; ++k) {
    for (const double g : {-1.0, -0.5, 0.0, 0.5}) {
      const bf::DesingConstants c{k, 1.0, 1.0, 1.0};
      if (!(g < c.delta / c.tau)) continue;
      bf::DesingConstants analytic = c;
      analytic.beta *= o.corrupt_beta;
      const double e = std::abs(bf::hopf_numeric(c, g) - bf::hopf_curve_hat(g, analytic));
      ++n;
      if (!(e <= worst)) {
        worst = e;
        worst_k = k;
        worst_g = g;
      }
    }
  }
  add(r, "Hopf agreement", worst <= 1e-8,
      fmt::format("max |numeric - analytic| = {:.2e} at k={}, gamma={} over {} points (tol 1e-8)", worst, worst_k,
                  worst_g, n));
  return r;
}

CriterionResult saddle_node_agreement(const VerifyOptions&) {
  CriterionResult r;
  double worst_mu = 0.0, worst_rho = 0.0;
  for (int k = 1; k <= 2; ++k) {
    for (const double g : {0.25, 0.5, 1.0}) {
      const bf::DesingConstants c{k, 1.0, 1.0, 1.0};
      const auto s = bf::sn_numeric(c, g);
      // Fold location for beta = tau = delta = 1.
      const double rho = std::pow(k * g, 1.0 / (k * (1.0 + k)));
      worst_mu = std::max(worst_mu, std::abs(s.mu_hat - bf::sn_curve_hat(g, c)));
      worst_rho = std::max(worst_rho, std::abs(s.rho1 - rho));
    }
  }
  add(r, "saddle-node curve", worst_mu <= 1e-8, fmt::format("max |mu_sn numeric - analytic| = {:.2e}", worst_mu));
  add(r, "saddle-node location", worst_rho <= 1e-8, fmt::format("max |rho1 - (k gamma)^(1/(k(k+1)))| = {:.2e}", worst_rho));
  return r;
}

CriterionResult bt_identity(const VerifyOptions&) {
  CriterionResult r;
  double alg = 0.0, res = 0.0, loc = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const bf::DesingConstants c{k, 1.0, 1.0, 1.0};
    const auto [mu, g] = bf::bt_point_hat(c);
    alg = std::max({alg, std::abs(bf::hopf_curve_hat(g, c) - mu), std::abs(bf::sn_curve_hat(g, c) - mu)});
    res = std::max(res, bf::bt_residual_at(c, mu, g));
    const auto n = bf::bt_numeric(c);
    loc = std::max({loc, std::abs(n.mu_hat - mu), std::abs(n.gamma - g), n.residual});
  }
  add(r, "curves meet at BT", alg <= 1e-12, fmt::format("max |mu_ah(gamma_bt) - mu_bt|, |mu_sn(gamma_bt) - mu_bt| = {:.2e}", alg));
  add(r, "double-zero residual", res <= 1e-6, fmt::format("max(|trace|, |det|, |field|) at BT = {:.2e}", res));
  add(r, "numeric BT point", loc <= 1e-6, fmt::format("max deviation of the solved BT point = {:.2e}", loc));
  const auto p1 = bf::bt_point_hat({1, 1.0, 1.0, 1.0});
  const double d1 = std::max(std::abs(p1.first - 2.0), std::abs(p1.second - 1.0));
  add(r, "k=1 BT at (2, 1)", d1 <= 1e-12, fmt::format("(mu_hat, gamma) = ({:.15g}, {:.15g})", p1.first, p1.second));
  return r;
}

// ---------------------------------------------------------------- 4: supercriticality

CriterionResult supercriticality(const VerifyOptions& o) {
  CriterionResult r;
  double worst = -std::numeric_limits<double>::infinity();
  int n = 0;
  for (int k = 1; k <= 3; ++k) {
    const bf::DesingConstants c{k, 1.0, 1.0, 1.0};
    for (int i = 0; i <= 59; ++i) {
      const double g = -2.0 + 0.05 * i;
      if (!(g < c.delta / c.tau)) continue;
      worst = std::max(worst, bf::lyapunov_l1(g, c));
      ++n;
    }
  }
  add(r, "l1 < 0", worst < 0.0, fmt::format("max l1 = {:.4g} over {} points, k in 1..3, gamma in [-2, 0.95]", worst, n));
  if (o.fast) return r;
  const auto law = bf::hopf_amplitude_law({1, 1.0, 1.0, 1.0}, -1.0, 0.1, 10);
  add(r, "amplitude^2 linear", law.fit.r_squared > 0.99,
      fmt::format("R^2 = {:.5f}, slope {:.4g}, 10 cycles on (mu_ah, mu_ah + 0.1]", law.fit.r_squared, law.fit.slope));
  const double fmax = *std::max_element(law.floquets.begin(), law.floquets.end());
  add(r, "cycles stable", fmax < 1.0, fmt::format("max floquet = {:.4g}", fmax));
  return r;
}

// ---------------------------------------------------------------- 5: Hopf scaling

CriterionResult hopf_scaling(const VerifyOptions&) {
  CriterionResult r;
  const normalform::NormalFormParams p;
  for (const char* name : {"arctan_sigmoid", "sqrt_sigmoid"}) {
    const auto reg = make_builtin(name);
    std::vector<double> mus;
    for (const double e : kEpsLadder) mus.push_back(bf::hopf_full_numeric(p, reg, e).param);
    const double expected = reg.k / (reg.k + 1.0);
    const double analytic = bf::hopf_curve_hat(p.gamma, {reg.k, reg.beta, p.tau, p.delta});
    const bool positive = std::all_of(mus.begin(), mus.end(), [](double m) { return m > 0.0; });
    std::string values;
    for (const double m : mus) values += fmt::format(" {:.4g}", m);
    if (!positive) {
      add(r, fmt::format("{} slope", name), false, "mu_ah not positive on the ladder:" + values);
      continue;
    }
    const auto fit = fit_power_law(kEpsLadder, mus);
    add(r, fmt::format("{} slope", name), std::abs(fit.slope - expected) <= 0.02,
        fmt::format("slope {:.4f} vs {:.4f}; mu_ah:{}", fit.slope, expected, values));
    const double pref = std::exp(fit.intercept);
    if (analytic == 0.0) {
      add(r, fmt::format("{} prefactor", name), false,
          fmt::format("analytic prefactor is 0 at gamma = {}; fitted {:.4g}", p.gamma, pref));
    } else {
      add(r, fmt::format("{} prefactor", name), std::abs(pref / analytic - 1.0) <= 0.1,
          fmt::format("fitted {:.5g} vs analytic {:.5g}", pref, analytic));
    }
  }
  return r;
}

// ---------------------------------------------------------------- 6: relaxation convergence

CriterionResult relaxation_convergence(const VerifyOptions&) {
  CriterionResult r;
  const normalform::NormalFormParams p;
  for (const char* name : {"arctan_sigmoid", "sqrt_sigmoid"}) {
    const auto reg = make_builtin(name);
    const auto s = dyn::relax_convergence_study(p, reg, 0.3, kEpsLadder);
    std::string values;
    for (const auto& row : s.rows) values += row.found ? fmt::format(" {:.4g}", row.hausdorff) : " missing";
    add(r, fmt::format("{} cycles found", name), !s.partial, "H:" + values);
    add(r, fmt::format("{} slope", name), !s.partial && std::abs(s.fit.slope - s.expected_slope) <= 0.1,
        fmt::format("slope {:.4f} vs {:.4f} (R^2 {:.4f})", s.fit.slope, s.expected_slope, s.fit.r_squared));
    add(r, fmt::format("{} monotone", name), s.monotone, s.monotone ? "distance shrinks with eps" : "not monotone");
  }
  return r;
}

// ---------------------------------------------------------------- 7: cycle branch

CriterionResult cycle_branch(const VerifyOptions&) {
  CriterionResult r;
  const normalform::NormalFormParams p;
  const auto reg = make_builtin("sqrt_sigmoid");
  const double eps = 1e-3;
  const double target = 5.0 * std::pow(eps, 2.0 / 3.0);
  const auto b = dyn::continue_cycle_in_mu(p, reg, eps, {0.02, 0.3}, 40);
  if (b.samples.empty()) {
    add(r, "branch exists", false, b.diagnostic);
    return r;
  }
  const double lo = b.samples.front().mu, hi = b.samples.back().mu;
  add(r, "unbroken from 0.3", std::abs(hi - 0.3) <= 1e-12 && b.terminated_by == dyn::Termination::WindowEdge,
      fmt::format("{} samples on [{:.4g}, {:.4g}], terminated by {}", b.samples.size(), lo, hi,
                  dyn::to_string(b.terminated_by)));
  add(r, "reaches O(eps^(2/3))", lo <= target, fmt::format("lowest mu {:.4g} vs 5 eps^(2/3) = {:.4g}", lo, target));
  bool mono = true;
  double fmax = 0.0;
  for (std::size_t i = 0; i < b.samples.size(); ++i) {
    if (i && !(b.samples[i].amplitude > b.samples[i - 1].amplitude)) mono = false;
    fmax = std::max(fmax, b.samples[i].cycle.floquet);
  }
  add(r, "amplitude monotone", mono, mono ? "amplitude increases with mu" : "amplitude not monotone");
  add(r, "floquet < 1", fmax < 1.0, fmt::format("max floquet = {:.3g}", fmax));
  return r;
}

// ---------------------------------------------------------------- 8: Gause

CriterionResult gause(const VerifyOptions& o) {
  CriterionResult r;
  app::GauseParams p;
  const double mu_bf = app::gause_mu_bf(p);
  add(r, "mu_bf = 0.5", std::abs(mu_bf - 0.5) <= 1e-12, fmt::format("mu_bf = {:.15g}", mu_bf));
  const auto cand = fl::detect_bf(app::gause_pws(p), {0.0, 1.0});
  if (!cand) {
    add(r, "detect_bf agrees", false, "no BF point found on [0, 1]");
  } else {
    add(r, "detect_bf agrees", std::abs(cand->alpha_bf - mu_bf) <= 1e-10,
        fmt::format("alpha_bf = {:.15g}, |diff| = {:.2e}", cand->alpha_bf, std::abs(cand->alpha_bf - mu_bf)));
  }
  if (o.fast) return r;

  const auto reg = make_builtin("sqrt_sigmoid");
  p.mu = 0.2;
  const auto cyc = app::gause_cycle(p, reg, 1e-2);
  const bool stable = cyc.cycle && cyc.cycle->stable;
  add(r, "cycle at mu = 0.2", stable,
      cyc.cycle ? fmt::format("period {:.5g}, floquet {:.3g}", cyc.cycle->period, cyc.cycle->floquet)
                : cyc.diagnostic);
  const auto ms = app::gause_multistart(p, reg, 1e-2, 10, {0.0, 3.0, -0.1, 2.0});
  std::string failed;
  double anchor_err = 0.0;
  for (std::size_t i = 0; i < ms.starts.size(); ++i) {
    if (!ms.anchors[i]) {
      failed += fmt::format(" ({:.4g}, {:.4g}): {};", ms.starts[i].x, ms.starts[i].y, ms.diagnostics[i]);
    } else if (stable) {
      anchor_err = std::max(anchor_err, dist(*ms.anchors[i], cyc.cycle->anchor));
    }
  }
  const int ok = static_cast<int>(std::count_if(ms.anchors.begin(), ms.anchors.end(), [](const auto& a) { return a.has_value(); }));
  add(r, "multi-start convergence", ms.all_converged && stable && anchor_err <= 1e-6,
      fmt::format("{}/10 converged, max anchor deviation {:.2e}{}", ok, anchor_err,
                  failed.empty() ? "" : "; failed:" + failed));

  p.mu = 1.0;
  const auto none = app::gause_cycle(p, reg, 1e-2);
  add(r, "no cycle at mu = 1", !none.cycle, none.cycle ? "a cycle was found" : none.diagnostic);
  const auto eq = app::gause_equilibrium_check(p, reg, 1e-2);
  add(r, "equilibrium attracts", eq.attracting,
      fmt::format("max Re = {:.4g}, distance after t = 500: {:.2e}", eq.eigenvalues.max_real(), eq.final_distance));

  p.mu = 0.2;
  std::vector<double> gaps;
  for (const double e : kEpsLadder) gaps.push_back(std::abs(app::gause_hopf(p, reg, e).param - mu_bf));
  const auto fit = fit_power_law(kEpsLadder, gaps);
  add(r, "Hopf scaling slope", std::abs(fit.slope - 2.0 / 3.0) <= 0.03,
      fmt::format("|mu_ah - mu_bf| slope {:.4f} vs 0.6667", fit.slope));
  return r;
}

// ---------------------------------------------------------------- 9: stick-slip

CriterionResult stickslip(const VerifyOptions& o) {
  CriterionResult r;
  const app::StickSlipParams sp;
  const double d0 = app::stribeck_deriv(sp, 0.0);
  add(r, "mu_+'(0) = -0.75", std::abs(d0 + 0.75) <= 1e-12, fmt::format("mu_+'(0) = {:.15g}", d0));
  const app::StickSlipModel model(sp, make_builtin("sqrt_sigmoid"));
  const double expected = std::cbrt(4.0 / 3.0);
  const double c_an = app::stickslip_alpha_ah_prefactor(sp, model.reg());
  add(r, "analytic prefactor", std::abs(c_an - expected) <= 1e-12, fmt::format("{:.15g} vs (4/3)^(1/3)", c_an));
  if (o.fast) return r;

  std::vector<double> alphas;
  for (const double e : kEpsLadder) alphas.push_back(app::stickslip_alpha_ah(model, e).numeric);
  const auto fit = fit_power_law(kEpsLadder, alphas);
  const double pref = std::exp(fit.intercept);
  add(r, "Hopf prefactor", std::abs(pref / expected - 1.0) <= 0.1,
      fmt::format("fitted {:.5g} (slope {:.4f}) vs {:.5g}", pref, fit.slope, expected));

  const auto c = app::stickslip_cycle(model, 0.5, 1e-2);
  const auto m = app::stickslip_cycle(model, -0.5, 1e-2);
  add(r, "cycle at alpha = 0.5", c.cycle && c.cycle->stable,
      c.cycle ? fmt::format("period {:.5g}, floquet {:.3g}", c.cycle->period, c.cycle->floquet) : c.diagnostic);
  if (c.cycle && m.cycle) {
    Polyline mapped;
    for (const auto& z : m.cycle->points) mapped.push_back(-z);
    const double h = dyn::hausdorff(c.cycle->points, mapped, 1e-3);
    add(r, "symmetry", h <= 1e-6, fmt::format("Hausdorff(cycle(alpha), -cycle(-alpha)) = {:.2e}", h));
  } else {
    add(r, "symmetry", false, m.cycle ? "no cycle at alpha" : "no cycle at -alpha: " + m.diagnostic);
  }

  std::vector<app::CreepReport> creep;
  for (const double e : {1e-2, 1e-3}) creep.push_back(app::creep_study(model, e, 0.5));
  for (const auto& cr : creep) {
    add(r, fmt::format("creep manifold eps={:g}", cr.eps), cr.manifold_residual <= 50.0 * cr.eps * cr.eps,
        fmt::format("residual {:.3e} = {:.3g} eps^2", cr.manifold_residual, cr.manifold_residual / (cr.eps * cr.eps)));
  }
  const double ratio = creep[1].halving_time / creep[0].halving_time;
  add(r, "creep drift time ratio", ratio >= 5.0 && ratio <= 20.0,
      fmt::format("T_half(1e-3) / T_half(1e-2) = {:.4g} / {:.4g} = {:.4g}", creep[1].halving_time,
                  creep[0].halving_time, ratio));
  return r;
}

// ---------------------------------------------------------------- 10: transforms

CriterionResult transforms(const VerifyOptions& o) {
  CriterionResult r;
  const auto pts = unit_points(o, 10000);
  double trip = 0.0, scale = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const double a = k / (k + 1.0);
    for (const auto& u : pts) {
      const blowup::Composite c{-3.0 + 6.0 * u[0], 0.05 + 0.95 * u[1], 0.05 + 1.95 * u[2], -2.0 + 4.0 * u[3]};
      const auto f = blowup::composite_forward(k, c.x1, c.nu1, c.rho1, c.mu_hat);
      const auto b = blowup::composite_inverse(k, f.x, f.y, f.eps, f.mu);
      const double e[] = {b.x1 - c.x1, b.nu1 - c.nu1, b.rho1 - c.rho1, b.mu_hat - c.mu_hat};
      const double v[] = {c.x1, c.nu1, c.rho1, c.mu_hat};
      for (int i = 0; i < 4; ++i) trip = std::max(trip, std::abs(e[i]) / std::max(std::abs(v[i]), 1e-3));
      const double m = c.mu_hat * std::pow(f.eps, a);
      scale = std::max(scale, std::abs(f.mu - m) / std::max(std::abs(m), 1e-300));
    }
  }
  add(r, "round trip", trip <= 1e-10, fmt::format("max relative error {:.2e} over 3 x 10^4 points", trip));
  add(r, "mu = mu_hat eps^(k/(k+1))", scale <= 1e-12, fmt::format("max relative error {:.2e}", scale));

  const normalform::NormalFormParams p;
  const double nu1 = 1e-3;
  double worst = 0.0;
  for (const char* name : {"arctan_sigmoid", "sqrt_sigmoid"}) {
    const auto reg = make_builtin(name);
    for (const double mu_hat : {-0.5, 0.0, 1.0}) {
      const blowup::DesingParams d{reg.k, reg.beta, p.tau, p.delta, p.gamma, mu_hat};
      double diff = 0.0, size = 0.0;
      for (int i = 0; i <= 30; ++i) {
        for (int j = 0; j <= 18; ++j) {
          const double x1 = -2.0 * reg.beta + 3.0 * reg.beta * i / 30.0;
          const double rho1 = 0.1 + 0.9 * j / 18.0;
          const Vec2 a = blowup::pushforward_desing(p, reg, x1, nu1, rho1, mu_hat);
          const Vec2 b = blowup::desing_field(d, x1, rho1);
          diff = std::max(diff, norm(a - b));
          size = std::max(size, norm(b));
        }
      }
      worst = std::max(worst, diff / size);
    }
  }
  add(r, "conjugacy", worst < 10.0 * nu1, fmt::format("max relative field error {:.2e} at nu1 = 1e-3", worst));
  return r;
}

// ---------------------------------------------------------------- 11: property suites

fl::PwsSystem mirror(const fl::PwsSystem& s) {
  auto flip = [](const fl::PlanarVectorField& f) {
    fl::PlanarVectorField g;
    g.value = [f](const Vec2& z, double a) {
      const Vec2 v = f(Vec2{-z.x, z.y}, -a);
      return Vec2{-v.x, v.y};
    };
    return g;
  };
  fl::PwsSystem m;
  m.name = s.name + "_mirrored";
  m.zplus = flip(s.zplus);
  m.zminus = flip(s.zminus);
  m.domain = {-s.domain.x_max, -s.domain.x_min, s.domain.y_min, s.domain.y_max};
  return m;
}

struct PwsCase {
  fl::PwsSystem sys;
  double alpha;
  Interval x;
  Interval bf_window;
};

std::vector<PwsCase> pws_cases() {
  app::GauseParams g;
  g.mu = 0.2;
  return {{normalform::pws_limit(normalform::NormalFormParams{}), 0.1, {-2.0, 2.0}, {-0.5, 0.5}},
          {app::gause_pws(g), 0.2, {0.01, 5.0}, {0.0, 1.0}},
          {app::stickslip_pws(app::StickSlipParams{}), 0.5, {-5.0, 5.0}, {-0.5, 0.5}}};
}

// Section through z transverse to the field there, restricted to a window around z.
dyn::Section section_through(const dyn::PlanarField& f, const Vec2& z, double half_width) {
  const Vec2 v = f(z);
  dyn::Section s;
  if (std::abs(v.y) >= std::abs(v.x)) {
    s.kind = dyn::SectionKind::Horizontal;
    s.level = z.y;
    s.direction = v.y > 0 ? dyn::Direction::Increasing : dyn::Direction::Decreasing;
    s.window = {z.x - half_width, z.x + half_width};
  } else {
    s.kind = dyn::SectionKind::Vertical;
    s.level = z.x;
    s.direction = v.x > 0 ? dyn::Direction::Increasing : dyn::Direction::Decreasing;
    s.window = {z.y - half_width, z.y + half_width};
  }
  return s;
}

CriterionResult property_suites(const VerifyOptions&) {
  CriterionResult r;
  const auto cases = pws_cases();

  // Sliding field equals the tangent convex combination.
  double conv = 0.0;
  int sliding_pts = 0;
  for (const auto& c : cases) {
    for (int i = 0; i <= 2000; ++i) {
      const double x = c.x.lo + c.x.width() * halton(i + 1, 2);
      if (fl::classify_point(c.sys, x, c.alpha) != fl::PointType::Sliding) continue;
      const double chi = fl::sliding_weight(c.sys, x, c.alpha);
      const Vec2 zp = c.sys.zplus({x, 0.0}, c.alpha), zm = c.sys.zminus({x, 0.0}, c.alpha);
      const Vec2 comb = chi * zp + (1.0 - chi) * zm;
      const double scale = std::max({1.0, norm(zp), norm(zm)});
      conv = std::max({conv, std::abs(fl::sliding_field(c.sys, x, c.alpha) - comb.x) / scale, std::abs(comb.y) / scale});
      ++sliding_pts;
    }
  }
  add(r, "sliding convex combination", sliding_pts > 0 && conv <= 1e-12,
      fmt::format("max deviation {:.2e} over {} sliding points", conv, sliding_pts));

  // Classification changes exactly at reported folds.
  std::string fold_issue;
  int folds_seen = 0;
  for (const auto& c : cases) {
    const auto folds = fl::find_folds(c.sys, c.x, c.alpha);
    folds_seen += static_cast<int>(folds.size());
    const int n = 8000;
    const double h = c.x.width() / n;
    auto near_fold = [&](double a, double b) {
      return std::any_of(folds.begin(), folds.end(), [&](const auto& f) { return f.x >= a - 1e-9 && f.x <= b + 1e-9; });
    };
    fl::PointType prev = fl::classify_point(c.sys, c.x.lo + 0.5 * h, c.alpha);
    for (int i = 1; i < n; ++i) {
      const double a = c.x.lo + (i - 0.5) * h, b = a + h;
      const fl::PointType cur = fl::classify_point(c.sys, b, c.alpha);
      if (cur != prev && !near_fold(a, b)) fold_issue += fmt::format(" {}: change without fold near x={:.4g};", c.sys.name, b);
      prev = cur;
    }
    for (const auto& f : folds) {
      const double d = 1e-6 * std::max(1.0, std::abs(f.x));
      if (fl::classify_point(c.sys, f.x - d, c.alpha) == fl::classify_point(c.sys, f.x + d, c.alpha)) {
        fold_issue += fmt::format(" {}: no change across fold x={:.6g};", c.sys.name, f.x);
      }
    }
  }
  add(r, "fold/classification consistency", fold_issue.empty() && folds_seen > 0,
      fold_issue.empty() ? fmt::format("{} folds checked on 3 systems", folds_seen) : fold_issue);

  // detect_bf under (x, alpha) -> (-x, -alpha).
  double mirror_err = 0.0;
  std::string mirror_issue;
  for (const auto& c : cases) {
    if (c.sys.name == "stickslip") continue;
    const auto a = fl::detect_bf(c.sys, c.bf_window);
    const auto b = fl::detect_bf(mirror(c.sys), {-c.bf_window.hi, -c.bf_window.lo});
    if (!a || !b) {
      mirror_issue += " " + c.sys.name + ": BF missing;";
      continue;
    }
    mirror_err = std::max({mirror_err, std::abs(a->alpha_bf + b->alpha_bf), dist(a->z_bf, Vec2{-b->z_bf.x, b->z_bf.y})});
  }
  add(r, "BF mirror invariance", mirror_issue.empty() && mirror_err <= 1e-10,
      mirror_issue.empty() ? fmt::format("max mismatch {:.2e}", mirror_err) : mirror_issue);

  // Solver order on the harmonic oscillator.
  const dyn::PlanarField osc = [](const Vec2& z) { return Vec2{z.y, -z.x}; };
  auto osc_error = [&](double tol) {
    dyn::IntegratorConfig cfg;
    cfg.rel_tol = tol;
    cfg.abs_tol = tol;
    const auto tr = dyn::integrate(osc, {1.0, 0.0}, {0.0, 20.0}, cfg);
    return dist(tr.z.back(), Vec2{std::cos(20.0), -std::sin(20.0)});
  };
  const double ratio = osc_error(1e-6) / osc_error(1e-6 / 16.0);
  add(r, "solver order floor", ratio >= 16.0, fmt::format("error ratio {:.4g} for tolerance ratio 16", ratio));

  // Event residuals.
  {
    dyn::IntegratorConfig cfg;
    const dyn::Section secs[] = {{dyn::SectionKind::Horizontal, 0.0, dyn::Direction::Both},
                                 {dyn::SectionKind::Vertical, 0.3, dyn::Direction::Increasing}};
    const auto tr = dyn::integrate(osc, {1.0, 0.0}, {0.0, 50.0}, cfg, secs);
    double worst = 0.0;
    for (const auto& hit : tr.hits) worst = std::max(worst, std::abs(secs[hit.section].value(hit.z)));
    add(r, "event consistency", !tr.hits.empty() && worst <= cfg.event_tol,
        fmt::format("{} hits, max |g| {:.2e} (event_tol {:.0e})", tr.hits.size(), worst, cfg.event_tol));
  }

  // Closure and re-convergence of stable cycles on the three models.
  struct Named {
    std::string name;
    dyn::PlanarField field;
    dyn::CycleResult res;
    double eps;
  };
  std::vector<Named> cycles;
  {
    const normalform::NormalFormParams p;
    const auto reg = make_builtin("sqrt_sigmoid");
    cycles.push_back({"normalform", normalform::bind_field(p, reg, 0.3, 1e-2), dyn::regularized_cycle(p, reg, 0.3, 1e-2), 1e-2});
    app::GauseParams g;
    cycles.push_back({"gause", [g, reg](const Vec2& z) { return app::gause_field(g, reg, z.x, z.y, 1e-2); },
                      app::gause_cycle(g, reg, 1e-2), 1e-2});
    const app::StickSlipModel m(app::StickSlipParams{}, reg);
    cycles.push_back({"stickslip", [m](const Vec2& z) { return m.field(z.x, z.y, 0.5, 1e-2); },
                      app::stickslip_cycle(m, 0.5, 1e-2), 1e-2});
  }
  std::string closure, reconv;
  double worst_gap = 0.0;
  for (const auto& c : cycles) {
    if (!c.res.cycle) {
      closure += fmt::format(" {}: {};", c.name, c.res.diagnostic);
      continue;
    }
    const auto& cyc = *c.res.cycle;
    const double rel = cyc.closure_gap / cyc.diameter();
    worst_gap = std::max(worst_gap, rel);
    if (!(rel <= 1e-9)) closure += fmt::format(" {}: gap {:.2e} diameter;", c.name, rel);
    if (!cyc.stable) continue;
    if (!(cyc.floquet < 1.0)) reconv += fmt::format(" {}: floquet {:.3g};", c.name, cyc.floquet);
    const auto sec = section_through(c.field, cyc.anchor, 0.25 * cyc.diameter());
    Vec2 z = sec.point(sec.coordinate(cyc.anchor) + 1e-3);
    int n = 0;
    const double tol = 1e-8 * std::max(1.0, norm(cyc.anchor));
    try {
      for (; n < 20 && dist(z, cyc.anchor) > tol; ++n) z = dyn::poincare_return(c.field, sec, z, dyn::cycle_config(c.eps)).point;
    } catch (const NumericalError& e) {
      reconv += fmt::format(" {}: {};", c.name, e.what());
      continue;
    }
    if (dist(z, cyc.anchor) > tol) reconv += fmt::format(" {}: off by {:.2e} after 20 returns;", c.name, dist(z, cyc.anchor));
  }
  add(r, "cycle closure", closure.empty(), closure.empty() ? fmt::format("max gap {:.2e} diameter", worst_gap) : closure);
  add(r, "re-convergence", reconv.empty(), reconv.empty() ? "perturbed starts return to the anchor within 20 returns" : reconv);
  return r;
}

const std::vector<CriterionInfo> kCriteria{
    {1, "Hopf agreement", 2.0, hopf_agreement},
    {2, "saddle-node agreement", 2.0, saddle_node_agreement},
    {3, "BT identity", 1.0, bt_identity},
    {4, "supercriticality", 30.0, supercriticality},
    {5, "Hopf scaling in the full system", 120.0, hopf_scaling},
    {6, "relaxation-oscillation convergence", 180.0, relaxation_convergence},
    {7, "cycle-branch connection", 120.0, cycle_branch},
    {8, "Gause model", 180.0, gause},
    {9, "stick-slip model", 180.0, stickslip},
    {10, "transform properties", 10.0, transforms},
    {11, "Filippov and solver properties", 30.0, property_suites},
};

bool fast_capable(int id) { return id != 5 && id != 6 && id != 7 && id != 11; }

}  // namespace

bool CriterionResult::passed() const {
  return !skipped && !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<std::string> CriterionResult::failed_checks() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

const std::vector<CriterionInfo>& criteria() { return kCriteria; }

std::vector<CriterionResult> run_verify(const VerifyOptions& opts,
                                        const std::function<void(const CriterionResult&)>& on_done) {
  std::vector<CriterionResult> out;
  for (const auto& info : kCriteria) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), info.id) == opts.only.end()) continue;
    CriterionResult r;
    if (opts.fast && !fast_capable(info.id)) {
      r.skipped = true;
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        r = info.run(opts);
      } catch (const std::exception& e) {
        r.checks.push_back({"completed", false, std::string("exception: ") + e.what()});
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      r.checks.push_back({"runtime", r.seconds <= info.budget_seconds,
                          fmt::format("{:.2f} s (budget {:g} s)", r.seconds, info.budget_seconds)});
    }
    r.id = info.id;
    r.title = info.title;
    r.budget_seconds = info.budget_seconds;
    if (on_done) on_done(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  if (r.skipped) return fmt::format("SKIP  {:2d}  {} (fast mode)", r.id, r.title);
  std::string line = fmt::format("{}  {:2d}  {}  ({:.2f} s / {:g} s)", r.passed() ? "PASS" : "FAIL", r.id, r.title,
                                 r.seconds, r.budget_seconds);
  const auto failed = r.failed_checks();
  if (!failed.empty()) {
    line += "  failed:";
    for (std::size_t i = 0; i < failed.size(); ++i) line += (i ? ", " : " ") + failed[i];
  }
  return line;
}

nlohmann::json to_json(const CriterionResult& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["skipped"] = r.skipped;
  j["passed"] = r.passed();
  j["seconds"] = r.seconds;
  j["budget_seconds"] = r.budget_seconds;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j;
}

}  // namespace regbf::cli
