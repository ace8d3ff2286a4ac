#include "regbf/bifurcation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "regbf/dynamics.hpp"
#include "regbf/errors.hpp"
#include "regbf/numerics.hpp"
#include "regbf/parallel.hpp"

namespace regbf::bifurcation {

namespace {

double kk_of(int k) { return k * (1.0 + k); }

void check_constants(const DesingConstants& c) {
  if (c.k < 1) throw ConfigError("k must be a positive integer");
  if (!(c.beta > 0.0) || !(c.tau > 0.0) || !(c.delta > 0.0)) throw ConfigError("beta, tau, delta must be positive");
}

double phi_eq(const blowup::DesingParams& p, double rho) {
  const int k = p.k;
  return p.gamma * p.beta - p.mu_hat * std::pow(rho, k * k) + p.delta * std::pow(rho, kk_of(k));
}

double rho_max(const blowup::DesingParams& p) {
  const double e = 1.0 / kk_of(p.k);
  const double m = std::max(p.mu_hat, 0.0) / p.delta;
  return 10.0 * std::max(1.0, std::pow(m, e) + std::pow(std::abs(p.gamma) * p.beta / p.delta, e));
}

DesingEquilibrium classify(const blowup::DesingParams& p, double rho, bool degenerate) {
  const Mat2 j = blowup::desing_jacobian(p, -p.beta, rho);
  DesingEquilibrium e;
  e.x1 = -p.beta;
  e.rho1 = rho;
  e.trace = j.trace();
  e.det = j.det();
  e.complex_pair = eigenvalues(j).complex_pair();
  if (degenerate) {
    e.type = EquilibriumType::SaddleNodeDegenerate;
  } else {
    e.type = e.det > 0.0 ? EquilibriumType::FocusOrNode : EquilibriumType::Saddle;
  }
  return e;
}

// Bracketed root of an increasing or decreasing piece of phi.
double root_on(const blowup::DesingParams& p, double lo, double hi) {
  auto f = [&](double r) { return phi_eq(p, r); };
  return find_root(f, lo, hi, 1e-15 * std::max(1.0, hi));
}

}  // namespace

double hopf_curve_hat(double gamma, const DesingConstants& c) {
  check_constants(c);
  if (!(gamma <= c.delta / c.tau)) throw DomainError("Hopf curve requires gamma <= delta/tau");
  const double k = c.k;
  return ((k * c.delta + c.tau * gamma) / k) * std::pow(k * c.beta / c.tau, 1.0 / (k + 1.0));
}

double sn_curve_hat(double gamma, const DesingConstants& c) {
  check_constants(c);
  if (!(gamma > 0.0)) throw DomainError("saddle-node curve requires gamma > 0");
  const double k = c.k;
  return ((1.0 + k) * c.delta / k) * std::pow(k * c.beta * gamma / c.delta, 1.0 / (k + 1.0));
}

std::pair<double, double> bt_point_hat(const DesingConstants& c) {
  check_constants(c);
  const double k = c.k;
  return {((1.0 + k) * c.delta / k) * std::pow(k * c.beta / c.tau, 1.0 / (1.0 + k)), c.delta / c.tau};
}

double lyapunov_l1(double gamma, const DesingConstants& c) {
  check_constants(c);
  if (!(gamma < c.delta / c.tau)) throw DomainError("l1 requires gamma < delta/tau");
  const double k = c.k;
  const double b = c.beta;
  return -(b * k * k * k * (1.0 + k) / (16.0 * (c.delta - gamma * c.tau))) *
         std::pow(b * k / c.tau, -2.0 / (k * (1.0 + k))) * ((2.0 + k) * c.delta - gamma * c.tau);
}

const char* to_string(EquilibriumType t) {
  switch (t) {
    case EquilibriumType::FocusOrNode: return "focus/node";
    case EquilibriumType::Saddle: return "saddle";
    case EquilibriumType::SaddleNodeDegenerate: return "saddle-node-degenerate";
  }
  return "unknown";
}

std::vector<DesingEquilibrium> equilibria_desing(const blowup::DesingParams& p) {
  p.validate();
  const double lo = 1e-12;
  double hi = rho_max(p);
  while (phi_eq(p, hi) <= 0.0) hi *= 2.0;
  std::vector<DesingEquilibrium> out;
  const double f_lo = phi_eq(p, lo);
  if (p.mu_hat <= 0.0) {
    if (f_lo < 0.0) out.push_back(classify(p, root_on(p, lo, hi), false));
    return out;
  }
  const double k = p.k;
  const double rho_c = std::pow(k * p.mu_hat / (p.delta * (1.0 + k)), 1.0 / k);
  if (rho_c <= lo) {
    if (f_lo < 0.0) out.push_back(classify(p, root_on(p, lo, hi), false));
    return out;
  }
  const double f_c = phi_eq(p, rho_c);
  if (std::abs(f_c) < 1e-10) {
    out.push_back(classify(p, rho_c, true));
    return out;
  }
  if (f_c > 0.0) return out;
  if (f_lo > 0.0) out.push_back(classify(p, root_on(p, lo, rho_c), false));
  out.push_back(classify(p, root_on(p, rho_c, hi), false));
  return out;
}

std::optional<DesingEquilibrium> focus_equilibrium(const blowup::DesingParams& p) {
  const auto eqs = equilibria_desing(p);
  for (auto it = eqs.rbegin(); it != eqs.rend(); ++it) {
    if (it->type == EquilibriumType::FocusOrNode) return *it;
  }
  return std::nullopt;
}

double hopf_numeric(const DesingConstants& c, double gamma) {
  check_constants(c);
  if (!(gamma < c.delta / c.tau)) throw DomainError("Hopf detection requires gamma < delta/tau");
  // The analytic value only sets the scan extent; it can be <= 0 when gamma <= -k delta/tau.
  const double scale = std::max(1.0, std::abs(hopf_curve_hat(gamma, c)));
  const double w_lo = -10.0 * scale;
  const double w_hi = 10.0 * scale;
  auto trace_at = [&](double mu_hat) -> std::optional<double> {
    const auto e = focus_equilibrium(c.with(gamma, mu_hat));
    if (!e || !(e->det > 0.0)) return std::nullopt;
    return e->trace;
  };
  const int n = 2000;
  double prev_mu = w_lo;
  std::optional<double> prev = trace_at(prev_mu);
  for (int i = 1; i <= n; ++i) {
    const double mu = w_lo + (w_hi - w_lo) * i / n;
    const auto cur = trace_at(mu);
    if (cur && !prev) {
      // Equilibria appear inside this cell; move the lower end up to the existence boundary.
      double a = prev_mu;
      double b = mu;
      while (b - a > 1e-15 * std::max(1.0, std::abs(b))) {
        const double m = 0.5 * (a + b);
        (trace_at(m) ? b : a) = m;
      }
      prev_mu = b;
      prev = trace_at(b);
    }
    if (cur && prev && (*prev < 0.0) != (*cur < 0.0)) {
      double a = prev_mu;
      double b = mu;
      const bool a_neg = *prev < 0.0;
      while (b - a > 1e-13 * std::max(1.0, std::abs(b))) {
        const double m = 0.5 * (a + b);
        const auto t = trace_at(m);
        if (!t) throw DetectionError("focus lost during Hopf bisection");
        ((*t < 0.0) == a_neg ? a : b) = m;
      }
      return 0.5 * (a + b);
    }
    prev_mu = mu;
    prev = cur;
  }
  std::ostringstream os;
  os << "no trace sign change of the focus on mu_hat in [" << w_lo << ", " << w_hi << "]";
  throw DetectionError(os.str());
}

SnNumeric sn_numeric(const DesingConstants& c, double gamma) {
  check_constants(c);
  if (!(gamma > 0.0)) throw DomainError("saddle-node detection requires gamma > 0");
  const int k = c.k;
  const double k2 = k * k;
  const double kk = kk_of(k);
  const double b = c.beta;
  const double d = c.delta;
  auto F = [&](const Vec2& z) {
    const double r = z.x;
    const double m = z.y;
    const double a = std::pow(r, k2);
    const double q = std::pow(r, kk);
    return Vec2{gamma * b - m * a + d * q, (1.0 + k) * b * gamma - (1.0 + 2.0 * k) * m * a + 2.0 * (1.0 + k) * d * q};
  };
  auto J = [&](const Vec2& z) {
    const double r = z.x;
    const double m = z.y;
    const double a1 = k2 * std::pow(r, k2 - 1.0);
    const double q1 = kk * std::pow(r, kk - 1.0);
    const double a = std::pow(r, k2);
    return Mat2{-m * a1 + d * q1, -a, -(1.0 + 2.0 * k) * m * a1 + 2.0 * (1.0 + k) * d * q1, -(1.0 + 2.0 * k) * a};
  };
  // Seed rho off the predicted location so the solve is not trivially converged.
  const double rho0 = 1.2 * std::pow(k * b * gamma / d, 1.0 / kk);
  const double mu0 = (gamma * b + d * std::pow(rho0, kk)) / std::pow(rho0, k2);
  const auto r = newton2(F, J, {rho0, mu0}, 1e-14, 100);
  if (!r.converged || !(r.z.x > 0.0)) {
    std::ostringstream os;
    os << "saddle-node Newton failed: residual " << r.residual << " after " << r.iterations << " iterations";
    throw NumericalError(os.str());
  }
  return {r.z.y, r.z.x, r.residual};
}

namespace {

struct BtResidual {
  double field, trace, det;
};

BtResidual bt_parts(const DesingConstants& c, double rho, double mu_hat, double gamma) {
  const auto p = c.with(gamma, mu_hat);
  const Vec2 f = blowup::desing_field(p, -c.beta, rho);
  const Mat2 j = blowup::desing_jacobian(p, -c.beta, rho);
  return {f.x, j.trace(), j.det()};
}

std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> r) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int i = col + 1; i < 3; ++i) {
      if (std::abs(a[i][col]) > std::abs(a[piv][col])) piv = i;
    }
    if (a[piv][col] == 0.0) throw NumericalError("singular 3x3 system");
    std::swap(a[piv], a[col]);
    std::swap(r[piv], r[col]);
    for (int i = col + 1; i < 3; ++i) {
      const double f = a[i][col] / a[col][col];
      for (int j = col; j < 3; ++j) a[i][j] -= f * a[col][j];
      r[i] -= f * r[col];
    }
  }
  std::array<double, 3> x{};
  for (int i = 2; i >= 0; --i) {
    double s = r[i];
    for (int j = i + 1; j < 3; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

double bt_residual_at(const DesingConstants& c, double mu_hat, double gamma) {
  check_constants(c);
  // The double zero sits on x1 = -beta where the trace vanishes.
  const double rho = std::pow(c.k * c.beta / c.tau, 1.0 / kk_of(c.k));
  const auto r = bt_parts(c, rho, mu_hat, gamma);
  return std::max({std::abs(r.field), std::abs(r.trace), std::abs(r.det)});
}

BtNumeric bt_numeric(const DesingConstants& c) {
  check_constants(c);
  const auto [mu_bt, gamma_bt] = bt_point_hat(c);
  std::array<double, 3> z{1.1 * std::pow(c.k * c.beta / c.tau, 1.0 / kk_of(c.k)), 1.05 * mu_bt, 0.95 * gamma_bt};
  auto G = [&](const std::array<double, 3>& v) {
    const auto r = bt_parts(c, v[0], v[1], v[2]);
    return std::array<double, 3>{r.field, r.trace, r.det};
  };
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    const auto g = G(z);
    res = std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
    if (res < 1e-14) break;
    std::array<std::array<double, 3>, 3> jac{};
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(z[j]));
      auto zp = z;
      auto zm = z;
      zp[j] += h;
      zm[j] -= h;
      const auto gp = G(zp);
      const auto gm = G(zm);
      for (int i = 0; i < 3; ++i) jac[i][j] = (gp[i] - gm[i]) / (2.0 * h);
    }
    const auto dz = solve3(jac, {-g[0], -g[1], -g[2]});
    for (int j = 0; j < 3; ++j) z[j] += dz[j];
    if (!(z[0] > 0.0)) throw NumericalError("BT Newton left rho1 > 0");
  }
  return {z[1], z[2], z[0], res};
}

dynamics::CycleResult desing_cycle(const blowup::DesingParams& p, double offset, const dynamics::IntegratorConfig& cfg,
                                   const dynamics::CycleOptions& opts) {
  const auto eq = focus_equilibrium(p);
  if (!eq) return {std::nullopt, "no focus equilibrium", 0};
  dynamics::PlanarField f = [p](const Vec2& z) { return blowup::desing_field(p, z.x, std::max(z.y, 0.0)); };
  const dynamics::Section sec{dynamics::SectionKind::Horizontal, eq->rho1, dynamics::Direction::Increasing,
                              {-p.beta, std::numeric_limits<double>::infinity()}};
  return dynamics::find_limit_cycle(f, sec, {-p.beta + offset, eq->rho1}, cfg, opts);
}

AmplitudeLaw hopf_amplitude_law(const DesingConstants& c, double gamma, double span, int samples) {
  check_constants(c);
  if (samples < 3) throw ConfigError("hopf_amplitude_law: need at least 3 samples");
  AmplitudeLaw out;
  out.mu_ah = hopf_numeric(c, gamma);
  dynamics::IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  std::vector<double> sq;
  for (int i = 1; i <= samples; ++i) {
    const double d = span * i / samples;
    const auto r = desing_cycle(c.with(gamma, out.mu_ah + d), 2.0 * std::sqrt(d), cfg);
    if (!r.cycle) throw DetectionError("hopf_amplitude_law: no cycle at offset " + std::to_string(d) + ": " +
                                       r.diagnostic);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& z : r.cycle->points) {
      lo = std::min(lo, z.x);
      hi = std::max(hi, z.x);
    }
    out.offsets.push_back(d);
    out.amplitudes.push_back(0.5 * (hi - lo));
    out.floquets.push_back(r.cycle->floquet);
    sq.push_back(out.amplitudes.back() * out.amplitudes.back());
  }
  out.fit = fit_line(out.offsets, sq);
  return out;
}

std::optional<double> homoclinic_locate(const DesingConstants& c, double gamma, double t_max) {
  check_constants(c);
  if (!(gamma > 0.0) || !(gamma < c.delta / c.tau)) return std::nullopt;
  double mu_ah = 0.0;
  try {
    mu_ah = hopf_numeric(c, gamma);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
  dynamics::IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  cfg.t_budget = 4.0 * t_max;
  dynamics::CycleOptions opts;
  opts.max_iterations = 80;

  // Result: period, or nullopt when no cycle is found.
  double last_offset = 0.0;
  auto cycle_at = [&](double mu_hat, double offset_guess) -> std::optional<double> {
    try {
      const auto r = desing_cycle(c.with(gamma, mu_hat), offset_guess, cfg, opts);
      if (!r.cycle || !r.cycle->stable) return std::nullopt;
      last_offset = r.cycle->anchor.x + c.beta;
      return r.cycle->period;
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  double step = 1e-6 * std::max(1.0, mu_ah);
  double good = mu_ah + step;
  // Near onset the cycle radius grows like sqrt((mu_hat - mu_ah) / |l1|), with l1 ~ 1/(delta - gamma tau).
  double offset = 2.0 * std::sqrt(step * (c.delta - gamma * c.tau) / c.delta);
  if (!cycle_at(good, offset)) return std::nullopt;
  offset = last_offset;
  double bad = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < 400; ++i) {
    const double trial = good + step;
    const auto period = cycle_at(trial, offset * 1.05);
    if (!period) {
      bad = trial;
      break;
    }
    if (*period > t_max) return trial;
    good = trial;
    offset = last_offset;
    step = std::min(step * 1.3, 0.05 * std::max(1.0, mu_ah));
  }
  if (std::isnan(bad)) return std::nullopt;
  for (int i = 0; i < 30 && bad - good > 1e-10 * std::max(1.0, good); ++i) {
    const double mid = 0.5 * (good + bad);
    const auto period = cycle_at(mid, offset);
    if (!period) {
      bad = mid;
    } else {
      if (*period > t_max) return mid;
      good = mid;
      offset = last_offset;
    }
  }
  return 0.5 * (good + bad);
}

EpsCurves eps_scale_curves(double gamma, double eps, const DesingConstants& c) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double s = std::pow(eps, c.k / (c.k + 1.0));
  EpsCurves out;
  out.mu_ah = hopf_curve_hat(gamma, c) * s;
  if (gamma > 0.0) out.mu_sn = sn_curve_hat(gamma, c) * s;
  out.mu_bt = bt_point_hat(c).first * s;
  return out;
}

std::vector<double> clustered_grid(double start, double center, double end, int per_decade, double min_offset) {
  if (per_decade < 1 || !(min_offset > 0.0)) throw ConfigError("invalid grid spacing");
  std::vector<double> g;
  auto ladder = [&](double from, bool towards_center) {
    const double span = std::abs(from - center);
    if (span <= min_offset) return std::vector<double>{};
    const int n = static_cast<int>(std::ceil(per_decade * std::log10(span / min_offset)));
    std::vector<double> side;
    const double sgn = from >= center ? 1.0 : -1.0;
    for (int i = 0; i <= n; ++i) side.push_back(center + sgn * span * std::pow(10.0, -static_cast<double>(i) / per_decade));
    if (!towards_center) std::reverse(side.begin(), side.end());
    return side;
  };
  for (double v : ladder(start, true)) g.push_back(v);
  g.push_back(center);
  for (double v : ladder(end, false)) g.push_back(v);
  return g;
}

HopfLocation locate_hopf(const ParamFamily& fam, const std::vector<double>& grid, Vec2 seed, double tol) {
  if (grid.size() < 2) throw ConfigError("Hopf scan needs at least two grid values");
  auto solve_at = [&](double prm, Vec2 guess) -> std::optional<Vec2> {
    auto F = [&](const Vec2& z) { return fam.field(z, prm); };
    auto J = [&](const Vec2& z) { return fam.jacobian(z, prm); };
    const auto r = newton2(F, J, guess, fam.residual_tol(prm), 80);
    if (!r.converged) return std::nullopt;
    return r.z;
  };
  auto continuation_error = [](double prm) {
    std::ostringstream os;
    os << "equilibrium continuation failed at parameter " << prm;
    return NumericalError(os.str());
  };
  std::vector<Vec2> eqs;
  std::vector<Mat2> jacs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Vec2 guess = seed;
    if (i >= 2 && grid[i - 1] != grid[i - 2]) {
      const double w = (grid[i] - grid[i - 1]) / (grid[i - 1] - grid[i - 2]);
      guess = eqs[i - 1] + w * (eqs[i - 1] - eqs[i - 2]);
    } else if (i == 1) {
      guess = eqs[0];
    }
    auto z = solve_at(grid[i], guess);
    if (!z && i > 0) z = solve_at(grid[i], eqs[i - 1]);
    if (!z) throw continuation_error(grid[i]);
    eqs.push_back(*z);
    jacs.push_back(fam.jacobian(*z, grid[i]));
    if (i == 0) continue;
    const Mat2& ja = jacs[i - 1];
    const Mat2& jb = jacs[i];
    if ((ja.trace() < 0.0) == (jb.trace() < 0.0) || !(ja.det() > 0.0) || !(jb.det() > 0.0)) continue;
    double a = grid[i - 1];
    double b = grid[i];
    Vec2 za = eqs[i - 1];
    const bool a_neg = ja.trace() < 0.0;
    while (std::abs(b - a) > tol) {
      const double m = 0.5 * (a + b);
      const auto zm = solve_at(m, za);
      if (!zm) throw continuation_error(m);
      if ((fam.jacobian(*zm, m).trace() < 0.0) == a_neg) {
        a = m;
        za = *zm;
      } else {
        b = m;
      }
    }
    HopfLocation out;
    out.param = 0.5 * (a + b);
    const auto z_final = solve_at(out.param, za);
    if (!z_final) throw continuation_error(out.param);
    out.equilibrium = *z_final;
    out.eigenvalues = eigenvalues(fam.jacobian(*z_final, out.param));
    out.grid_index = static_cast<int>(i);
    return out;
  }
  throw DetectionError("no complex eigenvalue pair crosses the imaginary axis on the scan");
}

HopfLocation hopf_full_numeric(const normalform::NormalFormParams& p, const RegularizationFunction& reg, double eps) {
  p.validate();
  if (!(eps >= 1e-8 && eps <= 1e-2)) throw DomainError("eps must lie in [1e-8, 1e-2]");
  if (!(p.gamma < p.delta / p.tau)) throw DomainError("Hopf detection requires gamma < delta/tau");
  ParamFamily fam;
  fam.field = [&](const Vec2& z, double mu) { return normalform::smooth_field(p, reg, z.x, z.y, mu, eps); };
  fam.jacobian = [&](const Vec2& z, double mu) { return normalform::smooth_jacobian(p, reg, z.x, z.y, mu, eps); };
  fam.residual_tol = [eps](double mu) { return 1e-13 * std::max(std::abs(mu), eps); };
  const auto grid = clustered_grid(0.5, 0.0, -0.5, 40, 1e-12);
  return locate_hopf(fam, grid, {0.0, 0.5 / p.delta});
}

BifurcationDiagram build_diagram(const DesingConstants& c, const std::vector<double>& gamma_grid,
                                 bool with_homoclinic) {
  check_constants(c);
  BifurcationDiagram d;
  d.constants = c;
  d.gamma_grid = gamma_grid;
  d.bt_point = bt_point_hat(c);
  struct Row {
    std::optional<double> ah, sn, hom;
  };
  const auto rows = parallel_map(gamma_grid.size(), [&](std::size_t i) {
    const double g = gamma_grid[i];
    Row r;
    if (g <= c.delta / c.tau) r.ah = hopf_curve_hat(g, c);
    if (g > 0.0) r.sn = sn_curve_hat(g, c);
    if (with_homoclinic) r.hom = homoclinic_locate(c, g);
    return r;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double g = gamma_grid[i];
    if (rows[i].ah) d.ah_curve.emplace_back(g, *rows[i].ah);
    if (rows[i].sn) d.sn_curve.emplace_back(g, *rows[i].sn);
    if (rows[i].hom) d.hom_samples.emplace_back(g, *rows[i].hom);
  }
  return d;
}

}  // namespace regbf::bifurcation
