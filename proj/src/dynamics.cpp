#include "regbf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "regbf/errors.hpp"
#include "regbf/parallel.hpp"

namespace regbf::dynamics {

std::optional<Equilibrium> find_equilibrium(const PlanarField& field, const PlanarJacobian& jacobian, Vec2 guess,
                                            double tol) {
  const auto r = newton2(field, jacobian, guess, tol, 50);
  if (!r.converged) return std::nullopt;
  return Equilibrium{r.z, eigenvalues(jacobian(r.z)), r.residual};
}

namespace {

struct ReturnEval {
  double s{0.0};
  double p{0.0};
  double time{0.0};
  double extent{0.0};
};

ReturnEval return_of(const PlanarField& field, const Section& sec, double s, const IntegratorConfig& cfg) {
  IntegrateOptions opts;
  opts.stop_after_hits = 1;
  opts.record = true;
  const Trajectory tr = integrate(field, sec.point(s), {0.0, cfg.t_budget}, cfg, std::span(&sec, 1), opts);
  if (!tr.stopped_on_event) throw BudgetError("no return to the section within the time budget", tr);
  double xmin = tr.z.front().x, xmax = xmin, ymin = tr.z.front().y, ymax = ymin;
  for (const auto& z : tr.z) {
    xmin = std::min(xmin, z.x);
    xmax = std::max(xmax, z.x);
    ymin = std::min(ymin, z.y);
    ymax = std::max(ymax, z.y);
  }
  return {s, sec.coordinate(tr.hits.back().z), tr.hits.back().t, std::hypot(xmax - xmin, ymax - ymin)};
}

}  // namespace

ReturnPoint poincare_return(const PlanarField& field, const Section& sec, Vec2 start, const IntegratorConfig& cfg) {
  if (std::abs(sec.value(start)) > 1e-9 * std::max(1.0, std::abs(sec.level))) {
    throw DomainError("poincare_return: start point is not on the section");
  }
  const ReturnEval r = return_of(field, sec, sec.coordinate(start), cfg);
  return {sec.point(r.p), r.time};
}

double LimitCycle::amplitude() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& z : points) m = std::max(m, z.y);
  return m;
}

double LimitCycle::diameter() const {
  if (points.empty()) return 0.0;
  double xmin = points.front().x, xmax = xmin, ymin = points.front().y, ymax = ymin;
  for (const auto& z : points) {
    xmin = std::min(xmin, z.x);
    xmax = std::max(xmax, z.x);
    ymin = std::min(ymin, z.y);
    ymax = std::max(ymax, z.y);
  }
  return std::hypot(xmax - xmin, ymax - ymin);
}

CycleResult find_limit_cycle(const PlanarField& field, const Section& sec, Vec2 guess, const IntegratorConfig& cfg,
                             const CycleOptions& opts) {
  CycleResult res;
  double s;
  try {
    if (std::abs(sec.value(guess)) <= 1e-12 * std::max(1.0, std::abs(sec.level)) && sec.in_window(guess)) {
      s = sec.coordinate(guess);
    } else {
      IntegrateOptions io;
      io.stop_after_hits = 1;
      io.record = false;
      const Trajectory tr = integrate(field, guess, {0.0, cfg.t_budget}, cfg, std::span(&sec, 1), io);
      if (!tr.stopped_on_event) {
        res.diagnostic = "guess never reaches the section";
        return res;
      }
      s = sec.coordinate(tr.hits.back().z);
    }
  } catch (const NumericalError& e) {
    res.diagnostic = std::string("approach to section failed: ") + e.what();
    return res;
  }

  auto P = [&](double x) {
    ++res.returns;
    return return_of(field, sec, x, cfg);
  };

  ReturnEval cur, prev;
  bool have_prev = false;
  bool converged = false;
  int iter = 0;
  try {
    cur = P(s);
    for (; iter < opts.max_iterations; ++iter) {
      if (cur.extent < opts.min_amplitude) {
        res.diagnostic = "orbit collapsed onto an equilibrium";
        return res;
      }
      const double r = cur.p - cur.s;
      const double tol = opts.fixed_point_tol * std::min(1.0, cur.extent);
      if (std::abs(r) <= tol) {
        converged = true;
        break;
      }
      double next = cur.p;
      if (have_prev) {
        const double rp = prev.p - prev.s;
        const double q = std::abs(r) / std::max(std::abs(rp), 1e-300);
        if (q > 0.5 && r != rp) {
          const double sec_step = cur.s - r * (cur.s - prev.s) / (r - rp);
          if (std::isfinite(sec_step) && sec.window.contains(sec_step)) next = sec_step;
        }
      }
      prev = cur;
      have_prev = true;
      try {
        cur = P(next);
      } catch (const BudgetError&) {
        if (next == prev.p) throw;
        cur = P(prev.p);
      }
    }
  } catch (const NumericalError& e) {
    res.diagnostic = std::string("return map failed: ") + e.what();
    return res;
  }
  if (!converged) {
    std::ostringstream os;
    os << "no convergence in " << opts.max_iterations << " iterations (residual " << std::abs(cur.p - cur.s) << ")";
    res.diagnostic = os.str();
    return res;
  }
  if (sec.window.contains(cur.s) &&
      std::min(std::abs(cur.s - sec.window.lo), std::abs(cur.s - sec.window.hi)) < opts.min_amplitude) {
    res.diagnostic = "fixed point sits on the section window edge";
    return res;
  }

  LimitCycle cyc;
  cyc.anchor = sec.point(cur.s);
  cyc.period = cur.time;
  cyc.iterations = iter;
  cyc.fixed_point_residual = std::abs(cur.p - cur.s);
  try {
    const double h = opts.fd_rel_step * std::max(cur.extent, 1e-12);
    const ReturnEval ep = P(cur.s + h);
    const ReturnEval em = P(cur.s - h);
    cyc.floquet = std::abs(ep.p - em.p) / (2.0 * h);

    IntegrateOptions io;
    io.stop_after_hits = 1;
    io.sample_spacing = opts.sample_spacing;
    const Trajectory tr = integrate(field, cyc.anchor, {0.0, cfg.t_budget}, cfg, std::span(&sec, 1), io);
    cyc.points = tr.z;
    cyc.closure_gap = dist(cyc.points.front(), cyc.points.back());
    cyc.points.back() = cyc.points.front();
  } catch (const NumericalError& e) {
    res.diagnostic = std::string("cycle post-processing failed: ") + e.what();
    return res;
  }
  cyc.stable = cyc.floquet < 1.0;
  res.cycle = std::move(cyc);
  return res;
}

Polyline resample(const Polyline& line, double spacing) {
  if (line.size() < 2 || !(spacing > 0.0)) return line;
  Polyline out;
  out.reserve(line.size());
  out.push_back(line.front());
  for (std::size_t i = 1; i < line.size(); ++i) {
    const Vec2 a = line[i - 1], b = line[i];
    const int n = static_cast<int>(std::ceil(dist(a, b) / spacing));
    for (int j = 1; j < n; ++j) out.push_back(a + (static_cast<double>(j) / n) * (b - a));
    out.push_back(b);
  }
  return out;
}

namespace {

double point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double l2 = ab.x * ab.x + ab.y * ab.y;
  double t = l2 > 0.0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, a + t * ab);
}

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using BgPoint = bg::model::point<double, 2, bg::cs::cartesian>;
using BgBox = bg::model::box<BgPoint>;

// Vertex R-tree. The segments adjacent to the two nearest vertices give the point-to-polyline
// distance up to spacing^2 / (8 d) for a resampled line.
class SegmentIndex {
 public:
  explicit SegmentIndex(const Polyline& line) : line_(line) {
    std::vector<std::pair<BgPoint, std::size_t>> pts;
    pts.reserve(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) pts.emplace_back(BgPoint{line[i].x, line[i].y}, i);
    tree_ = Tree(pts.begin(), pts.end());
  }

  double nearest(const Vec2& p) const {
    if (line_.size() == 1) return dist(p, line_.front());
    const BgPoint q{p.x, p.y};
    std::vector<std::pair<BgPoint, std::size_t>> hit;
    tree_.query(bgi::nearest(q, 2), std::back_inserter(hit));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& h : hit) {
      const std::size_t i = h.second;
      if (i > 0) best = std::min(best, point_segment(p, line_[i - 1], line_[i]));
      if (i + 1 < line_.size()) best = std::min(best, point_segment(p, line_[i], line_[i + 1]));
    }
    return best;
  }

 private:
  using Tree = bgi::rtree<std::pair<BgPoint, std::size_t>, bgi::rstar<16>>;
  const Polyline& line_;
  Tree tree_;
};

}  // namespace

double directed_hausdorff(const Polyline& a, const Polyline& b) {
  if (a.empty() || b.empty()) throw DomainError("hausdorff: empty polyline");
  const SegmentIndex grid(b);
  double d = 0.0;
  for (const auto& p : a) d = std::max(d, grid.nearest(p));
  return d;
}

double hausdorff(const Polyline& a, const Polyline& b, double spacing) {
  const Polyline ra = resample(a, spacing);
  const Polyline rb = resample(b, spacing);
  return std::max(directed_hausdorff(ra, rb), directed_hausdorff(rb, ra));
}

IntegratorConfig cycle_config(double eps) {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  cfg.layer_eps = eps;
  cfg.t_budget = 1e3;
  return cfg;
}

Section normalform_section(const Vec2& equilibrium) {
  Section sec;
  sec.kind = SectionKind::Horizontal;
  sec.level = 0.5 * equilibrium.y;
  sec.direction = Direction::Increasing;
  sec.window = {equilibrium.x, std::numeric_limits<double>::infinity()};
  return sec;
}

namespace {

std::optional<Equilibrium> normalform_equilibrium(const normalform::NormalFormParams& p,
                                                  const RegularizationFunction& reg, double mu, double eps,
                                                  Vec2 guess) {
  const auto f = normalform::bind_field(p, reg, mu, eps);
  const auto j = normalform::bind_jacobian(p, reg, mu, eps);
  return find_equilibrium(f, j, guess, 1e-13 * std::max({std::abs(mu), eps, 1e-300}));
}

CycleResult normalform_cycle(const normalform::NormalFormParams& p, const RegularizationFunction& reg, double mu,
                             double eps, const Vec2& eq, std::optional<double> anchor_guess) {
  const Section sec = normalform_section(eq);
  const Vec2 guess = sec.point(anchor_guess.value_or(eq.x + 1e-3 * std::abs(eq.y)));
  auto res = find_limit_cycle(normalform::bind_field(p, reg, mu, eps), sec, guess, cycle_config(eps));
  if (res.cycle) {
    res.cycle->mu = mu;
    res.cycle->eps = eps;
  }
  return res;
}

}  // namespace

CycleResult regularized_cycle(const normalform::NormalFormParams& p, const RegularizationFunction& reg, double mu,
                              double eps) {
  const auto pws_eq = normalform::pws_equilibria(p, mu);
  if (!pws_eq.focus) return {std::nullopt, "no focus of the upper field: " + pws_eq.diagnostic, 0};
  const auto eq = normalform_equilibrium(p, reg, mu, eps, *pws_eq.focus);
  if (!eq) return {std::nullopt, "equilibrium not found", 0};
  return normalform_cycle(p, reg, mu, eps, eq->point, std::nullopt);
}

ConvergenceStudy relax_convergence_study(const normalform::NormalFormParams& p, const RegularizationFunction& reg,
                                         double mu, const std::vector<double>& eps_ladder) {
  ConvergenceStudy study;
  study.expected_slope = 2.0 * reg.k / (2.0 * reg.k + 1.0);
  study.pws_cycle = normalform::build_pws_cycle(p, mu, 1e-4);
  const auto pws_eq = normalform::pws_equilibria(p, mu);
  if (!pws_eq.focus) throw DetectionError("no focus of the upper field: " + pws_eq.diagnostic);

  study.rows = parallel_map(eps_ladder.size(), [&](std::size_t i) {
    ConvergenceRow row;
    row.eps = eps_ladder[i];
    const auto eq = normalform_equilibrium(p, reg, mu, row.eps, *pws_eq.focus);
    if (!eq) {
      row.diagnostic = "equilibrium not found";
      return row;
    }
    const auto res = normalform_cycle(p, reg, mu, row.eps, eq->point, std::nullopt);
    if (!res.cycle) {
      row.diagnostic = res.diagnostic;
      return row;
    }
    row.found = true;
    row.period = res.cycle->period;
    row.floquet = res.cycle->floquet;
    row.hausdorff = hausdorff(res.cycle->points, study.pws_cycle.points, 1e-4);
    return row;
  });

  std::vector<double> xs, ys;
  for (const auto& r : study.rows) {
    if (r.found) {
      xs.push_back(r.eps);
      ys.push_back(r.hausdorff);
    } else {
      study.partial = true;
    }
  }
  if (xs.size() >= 2) study.fit = fit_power_law(xs, ys);
  // Monotone down the ladder: distances shrink as eps decreases.
  std::vector<std::pair<double, double>> sorted;
  for (std::size_t i = 0; i < xs.size(); ++i) sorted.emplace_back(xs[i], ys[i]);
  std::sort(sorted.begin(), sorted.end());
  study.monotone = !study.partial;
  for (std::size_t i = 1; i < sorted.size(); ++i) study.monotone = study.monotone && sorted[i].second > sorted[i - 1].second;
  return study;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::WindowEdge: return "window_edge";
    case Termination::DetectionFailure: return "detection_failure";
    case Termination::PeriodBlowup: return "period_blowup";
  }
  return "?";
}

CycleBranch continue_cycle_in_mu(const normalform::NormalFormParams& p, const RegularizationFunction& reg,
                                 double eps, Interval mu_window, int steps, double period_limit) {
  if (!(mu_window.lo > 0.0) || !(mu_window.hi > mu_window.lo) || steps < 2) {
    throw ConfigError("cycle continuation needs 0 < mu_lo < mu_hi and at least two steps");
  }
  CycleBranch branch;
  branch.eps = eps;
  Vec2 eq_guess{0.0, mu_window.hi / p.delta};
  std::optional<double> anchor;
  double prev_mu = mu_window.hi;
  std::vector<BranchSample> marched;
  for (int i = 0; i < steps; ++i) {
    const double mu = mu_window.hi * std::pow(mu_window.lo / mu_window.hi, static_cast<double>(i) / (steps - 1));
    const double scale = mu / prev_mu;
    const auto eq = normalform_equilibrium(p, reg, mu, eps, scale * eq_guess);
    if (!eq) {
      branch.terminated_by = Termination::DetectionFailure;
      branch.diagnostic = "equilibrium continuation failed";
      branch.last_failed_mu = mu;
      break;
    }
    std::optional<double> a;
    if (anchor) a = eq->point.x + scale * (*anchor - eq_guess.x);
    const auto res = normalform_cycle(p, reg, mu, eps, eq->point, a);
    if (!res.cycle || !res.cycle->stable) {
      branch.terminated_by = Termination::DetectionFailure;
      branch.diagnostic = res.cycle ? "cycle lost stability" : res.diagnostic;
      branch.last_failed_mu = mu;
      break;
    }
    if (res.cycle->period > period_limit) {
      branch.terminated_by = Termination::PeriodBlowup;
      branch.last_failed_mu = mu;
      break;
    }
    BranchSample s;
    s.mu = mu;
    s.amplitude = res.cycle->amplitude();
    s.cycle = *res.cycle;
    marched.push_back(std::move(s));
    eq_guess = eq->point;
    anchor = res.cycle->anchor.x;
    prev_mu = mu;
  }
  std::reverse(marched.begin(), marched.end());
  branch.samples = std::move(marched);
  return branch;
}

std::vector<EquilibriumBranch> continue_equilibrium_in_mu(const normalform::NormalFormParams& p,
                                                          const RegularizationFunction& reg, double eps,
                                                          Interval mu_window, int steps) {
  if (steps < 2 || !(mu_window.hi > mu_window.lo)) throw ConfigError("equilibrium continuation needs a window");
  std::vector<EquilibriumBranch> out;

  auto march = [&](EquilibriumBranch& br, Vec2 guess) {
    double prev = std::nan("");
    for (int i = 0; i < steps; ++i) {
      const double mu = mu_window.hi - mu_window.width() * i / (steps - 1);
      std::optional<Equilibrium> eq = normalform_equilibrium(p, reg, mu, eps, guess);
      if (!eq && !std::isnan(prev)) {
        // Retry with a half step.
        const auto mid = normalform_equilibrium(p, reg, 0.5 * (mu + prev), eps, guess);
        if (mid) eq = normalform_equilibrium(p, reg, mu, eps, mid->point);
      }
      if (!eq) {
        br.complete = false;
        return;
      }
      br.samples.push_back({mu, eq->point, eq->eigenvalues});
      guess = eq->point;
      prev = mu;
    }
  };

  EquilibriumBranch focus{"p", {}, true};
  const double mu0 = mu_window.hi;
  march(focus, {0.0, mu0 / p.delta});
  out.push_back(std::move(focus));

  if (p.gamma > 0.0 && mu0 > 0.0) {
    const double x = -mu0 / p.gamma;
    const double target = 1.0 / (1.0 - x);
    const double s = find_root([&](double v) { return reg.eval(v) - target; }, -1e6, 1e6, 1e-13);
    EquilibriumBranch saddle{"p_s", {}, true};
    march(saddle, {x, s * eps});
    out.push_back(std::move(saddle));
  }
  return out;
}

}  // namespace regbf::dynamics
