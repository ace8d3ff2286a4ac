#include "regbf/filippov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "regbf/errors.hpp"
#include "regbf/numerics.hpp"
#include "regbf/ode.hpp"

namespace regbf::filippov {

Mat2 PlanarVectorField::jacobian_at(const Vec2& z, double alpha) const {
  if (jacobian) return jacobian(z, alpha);
  return fd_jacobian([&](const Vec2& w) { return value(w, alpha); }, z);
}

Vec2 PlanarVectorField::parameter_derivative(const Vec2& z, double alpha) const {
  const double h = 1e-7 * std::max(1.0, std::abs(alpha));
  const Vec2 p = value(z, alpha + h), m = value(z, alpha - h);
  return {(p.x - m.x) / (2 * h), (p.y - m.y) / (2 * h)};
}

void PwsSystem::validate() const {
  if (!zplus.value || !zminus.value) throw ConfigError("PWS system '" + name + "' is missing a vector field");
  if (!(domain.y_min < 0.0 && domain.y_max > 0.0) || !(domain.x_min < domain.x_max)) {
    throw ConfigError("PWS domain must straddle the switching line y = 0");
  }
}

const char* to_string(PointType t) {
  switch (t) {
    case PointType::Crossing: return "crossing";
    case PointType::Sliding: return "sliding";
    case PointType::Tangency: return "tangency";
  }
  return "?";
}

const char* to_string(Visibility v) {
  switch (v) {
    case Visibility::Visible: return "visible";
    case Visibility::Invisible: return "invisible";
    case Visibility::Degenerate: return "degenerate";
  }
  return "?";
}

const char* to_string(Side s) { return s == Side::Plus ? "plus" : "minus"; }

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Neutral: return "neutral";
  }
  return "?";
}

const char* to_string(BfType t) {
  switch (t) {
    case BfType::BF1: return "BF1";
    case BfType::BF2: return "BF2";
    case BfType::BF3: return "BF3";
    case BfType::BF4: return "BF4";
    case BfType::BF5: return "BF5";
    case BfType::Degenerate: return "degenerate";
  }
  return "?";
}

double lie_plus(const PwsSystem& sys, double x, double alpha) { return sys.zplus({x, 0.0}, alpha).y; }
double lie_minus(const PwsSystem& sys, double x, double alpha) { return sys.zminus({x, 0.0}, alpha).y; }

PointType classify_point(const PwsSystem& sys, double x, double alpha) {
  const Vec2 zp = sys.zplus({x, 0.0}, alpha);
  const Vec2 zm = sys.zminus({x, 0.0}, alpha);
  const double product = zp.y * zm.y;
  const double tol = 1e-12 * norm(zp) * norm(zm);
  if (std::abs(product) <= tol) return PointType::Tangency;
  return product > 0.0 ? PointType::Crossing : PointType::Sliding;
}

double sliding_field(const PwsSystem& sys, double x, double alpha) {
  const Vec2 zp = sys.zplus({x, 0.0}, alpha);
  const Vec2 zm = sys.zminus({x, 0.0}, alpha);
  const double denom = zm.y - zp.y;
  if (std::abs(denom) < 1e-14) throw DegenerateError("degenerate sliding: Z2- - Z2+ vanishes");
  return (zp.x * zm.y - zm.x * zp.y) / denom;
}

double sliding_weight(const PwsSystem& sys, double x, double alpha) {
  const Vec2 zp = sys.zplus({x, 0.0}, alpha);
  const Vec2 zm = sys.zminus({x, 0.0}, alpha);
  const double denom = zm.y - zp.y;
  if (std::abs(denom) < 1e-14) throw DegenerateError("degenerate sliding: Z2- - Z2+ vanishes");
  return zm.y / denom;
}

namespace {

double second_lie(const PlanarVectorField& f, double x, double alpha) {
  const Vec2 z{x, 0.0};
  const Vec2 v = f(z, alpha);
  const Mat2 j = f.jacobian_at(z, alpha);
  return j.c * v.x + j.d * v.y;
}

void add_folds(const PlanarVectorField& f, Side side, Interval iv, double alpha, int samples,
               std::vector<FoldPoint>& out) {
  auto g = [&](double x) { return f({x, 0.0}, alpha).y; };
  for (const auto& br : sign_change_brackets(g, iv.lo, iv.hi, samples)) {
    const double x = find_root(g, br.lo, br.hi, 1e-12);
    bool dup = false;
    for (const auto& fp : out) dup = dup || (fp.side == side && std::abs(fp.x - x) < 1e-9);
    if (dup) continue;
    FoldPoint fp;
    fp.x = x;
    fp.side = side;
    fp.second_lie = second_lie(f, x, alpha);
    if (std::abs(fp.second_lie) < 1e-10) {
      fp.visibility = Visibility::Degenerate;
    } else if (side == Side::Plus) {
      fp.visibility = fp.second_lie > 0.0 ? Visibility::Visible : Visibility::Invisible;
    } else {
      fp.visibility = fp.second_lie < 0.0 ? Visibility::Visible : Visibility::Invisible;
    }
    out.push_back(fp);
  }
}

double sliding_derivative_at(const PwsSystem& sys, double x, double alpha) {
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  return (sliding_field(sys, x + h, alpha) - sliding_field(sys, x - h, alpha)) / (2 * h);
}

}  // namespace

std::vector<FoldPoint> find_folds(const PwsSystem& sys, Interval x_interval, double alpha, int samples) {
  std::vector<FoldPoint> out;
  add_folds(sys.zplus, Side::Plus, x_interval, alpha, samples, out);
  add_folds(sys.zminus, Side::Minus, x_interval, alpha, samples, out);
  std::sort(out.begin(), out.end(), [](const FoldPoint& a, const FoldPoint& b) { return a.x < b.x; });
  return out;
}

std::vector<SlidingEquilibrium> sliding_equilibria(const PwsSystem& sys, double alpha, Interval x_interval,
                                                   int samples, bool include_virtual) {
  auto g = [&](double x) {
    if (!include_virtual && classify_point(sys, x, alpha) != PointType::Sliding) return std::nan("");
    try {
      return sliding_field(sys, x, alpha);
    } catch (const DegenerateError&) {
      return std::nan("");
    }
  };
  std::vector<SlidingEquilibrium> out;
  for (const auto& br : sign_change_brackets(g, x_interval.lo, x_interval.hi, samples)) {
    double x;
    try {
      x = find_root(g, br.lo, br.hi, 1e-13);
    } catch (const NumericalError&) {
      continue;
    }
    if (!out.empty() && std::abs(out.back().x - x) < 1e-9) continue;
    SlidingEquilibrium e;
    e.x = x;
    e.admissible = classify_point(sys, x, alpha) == PointType::Sliding;
    e.derivative = sliding_derivative_at(sys, x, alpha);
    if (std::abs(e.derivative) < 1e-10) e.stability = Stability::Neutral;
    else e.stability = e.derivative < 0.0 ? Stability::Stable : Stability::Unstable;
    out.push_back(e);
  }
  return out;
}

namespace {

BfCandidate evaluate_candidate(const PwsSystem& sys, double x, double alpha) {
  BfCandidate c;
  c.z_bf = {x, 0.0};
  c.alpha_bf = alpha;
  const Mat2 j = sys.zplus.jacobian_at(c.z_bf, alpha);
  const EigenPair ev = eigenvalues(j);
  c.eigenvalue = ev.first;
  c.A = ev.first.real();
  c.B = std::abs(ev.first.imag());
  c.lower_normal = sys.zminus(c.z_bf, alpha).y;
  const Vec2 za = sys.zplus.parameter_derivative(c.z_bf, alpha);
  c.determinant_condition = za.x * j.c - za.y * j.a;
  try {
    c.sliding_derivative = sliding_derivative_at(sys, x, alpha);
  } catch (const DegenerateError&) {
    c.sliding_derivative = 0.0;
  }
  constexpr double tol = 1e-8;
  if (c.B < tol) c.degenerate_conditions.push_back("not a focus: B = 0");
  if (std::abs(c.A) < tol) c.degenerate_conditions.push_back("focus real part A = 0");
  if (std::abs(c.lower_normal) < tol) c.degenerate_conditions.push_back("lower field tangent: Z2- = 0");
  if (std::abs(c.determinant_condition) < tol) {
    c.degenerate_conditions.push_back("transversality determinant = 0");
  }
  if (std::abs(c.sliding_derivative) < tol) c.degenerate_conditions.push_back("sliding derivative = 0");
  return c;
}

}  // namespace

std::optional<BfCandidate> detect_bf(const PwsSystem& sys, Interval alpha_interval) {
  sys.validate();
  auto G = [&](const Vec2& v) { return sys.zplus({v.x, 0.0}, v.y); };
  auto JG = [&](const Vec2& v) {
    const Mat2 j = sys.zplus.jacobian_at({v.x, 0.0}, v.y);
    const Vec2 pa = sys.zplus.parameter_derivative({v.x, 0.0}, v.y);
    return Mat2{j.a, pa.x, j.c, pa.y};
  };
  const double atol = 1e-9 * std::max(1.0, alpha_interval.width());
  std::vector<BfCandidate> found;
  constexpr int nx = 9, na = 9;
  for (int i = 0; i < nx; ++i) {
    const double x0 = sys.domain.x_min + (sys.domain.x_max - sys.domain.x_min) * (i + 0.5) / nx;
    for (int j = 0; j < na; ++j) {
      const double a0 = alpha_interval.lo + alpha_interval.width() * j / (na - 1);
      const auto r = newton2(G, JG, {x0, a0}, 1e-13, 60);
      if (!r.converged) continue;
      if (r.z.y < alpha_interval.lo - atol || r.z.y > alpha_interval.hi + atol) continue;
      if (r.z.x < sys.domain.x_min || r.z.x > sys.domain.x_max) continue;
      bool dup = false;
      for (const auto& c : found) dup = dup || (std::abs(c.z_bf.x - r.z.x) < 1e-8 && std::abs(c.alpha_bf - r.z.y) < 1e-8);
      if (!dup) found.push_back(evaluate_candidate(sys, r.z.x, r.z.y));
    }
  }
  if (found.empty()) return std::nullopt;
  // Prefer focus-type collisions, then the fewest failing conditions.
  auto rank = [](const BfCandidate& c) {
    int r = static_cast<int>(c.degenerate_conditions.size());
    if (c.B < 1e-8) r += 100;
    return r;
  };
  std::stable_sort(found.begin(), found.end(),
                   [&](const BfCandidate& a, const BfCandidate& b) { return rank(a) < rank(b); });
  if (found.front().B < 1e-8) return std::nullopt;
  return found.front();
}

DropResult drop_point(const PwsSystem& sys, double alpha, double x_fold, double spacing, double t_budget) {
  dynamics::IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  cfg.t_budget = t_budget;
  const dynamics::Section sec{dynamics::SectionKind::Horizontal, 0.0, dynamics::Direction::Decreasing};
  dynamics::IntegrateOptions opts;
  opts.stop_after_hits = 1;
  opts.sample_spacing = spacing;
  auto f = [&](const Vec2& z) { return sys.zplus(z, alpha); };
  dynamics::Trajectory tr;
  try {
    tr = dynamics::integrate(f, {x_fold, 0.0}, {0.0, t_budget}, cfg, std::span(&sec, 1), opts);
  } catch (const dynamics::BudgetError& e) {
    throw dynamics::BudgetError("grazing orbit does not return to the switching line within the time budget",
                                e.partial());
  }
  if (!tr.stopped_on_event) {
    throw dynamics::BudgetError("grazing orbit does not return to the switching line within the time budget", tr);
  }
  DropResult d;
  d.x_drop = tr.hits.back().z.x;
  d.flight_time = tr.hits.back().t;
  d.arc = std::move(tr.z);
  d.arc.back() = {d.x_drop, 0.0};
  return d;
}

BfClassification classify_bf(const PwsSystem& sys, const BfCandidate& bf, double probe) {
  BfClassification out;
  if (bf.degenerate()) {
    out.type = BfType::Degenerate;
    out.note = bf.degenerate_conditions.front();
    return out;
  }
  const double gamma = bf.sliding_derivative;
  if (bf.lower_normal < 0.0) {
    out.type = gamma < 0.0 ? BfType::BF4 : BfType::BF5;
    out.note = "unstable sliding";
    return out;
  }
  if (gamma < 0.0) {
    out.type = BfType::BF3;
    out.note = "stable sliding, stable pseudo-equilibrium side";
    return out;
  }
  // gamma > 0: compare drop point with the sliding equilibrium on the visible side.
  const double width = sys.domain.x_max - sys.domain.x_min;
  for (double sgn : {1.0, -1.0}) {
    const double alpha = bf.alpha_bf + sgn * probe;
    const Interval near{std::max(sys.domain.x_min, bf.z_bf.x - 0.25 * width),
                        std::min(sys.domain.x_max, bf.z_bf.x + 0.25 * width)};
    const auto folds = find_folds(sys, near, alpha);
    const FoldPoint* fold = nullptr;
    for (const auto& fp : folds) {
      if (fp.side != Side::Plus || fp.visibility != Visibility::Visible) continue;
      if (!fold || std::abs(fp.x - bf.z_bf.x) < std::abs(fold->x - bf.z_bf.x)) fold = &fp;
    }
    if (!fold) continue;
    out.probe_alpha = alpha;
    out.x_fold = fold->x;
    const DropResult d = drop_point(sys, alpha, fold->x);
    out.x_drop = d.x_drop;
    const double reach = 2.0 * std::abs(d.x_drop - fold->x) + 1e-6;
    const Interval seg{std::max(sys.domain.x_min, fold->x - reach), std::min(sys.domain.x_max, fold->x + reach)};
    const auto eqs = sliding_equilibria(sys, alpha, seg);
    const SlidingEquilibrium* ps = nullptr;
    for (const auto& e : eqs) {
      if (!ps || std::abs(e.x - fold->x) < std::abs(ps->x - fold->x)) ps = &e;
    }
    if (!ps) {
      out.type = BfType::BF1;
      out.note = "no sliding equilibrium near the fold";
      return out;
    }
    out.x_sliding_eq = ps->x;
    if (std::abs(d.x_drop - ps->x) < 1e-8) {
      out.hbf_degenerate = true;
      out.type = BfType::Degenerate;
      out.note = "drop point coincides with the sliding equilibrium (HBF)";
      return out;
    }
    const double lo = std::min(d.x_drop, fold->x), hi = std::max(d.x_drop, fold->x);
    const bool inside = ps->x > lo && ps->x < hi;
    out.type = inside ? BfType::BF2 : BfType::BF1;
    out.note = inside ? "sliding equilibrium lies on the sliding segment" : "drop point beyond the sliding equilibrium";
    return out;
  }
  out.type = BfType::Degenerate;
  out.note = "no visible fold found on either side of the BF value";
  return out;
}

PwsCycle construct_pws_cycle(const PwsSystem& sys, double alpha, const FoldPoint& fold, double spacing,
                             double t_budget) {
  if (fold.side != Side::Plus || fold.visibility != Visibility::Visible) {
    throw DomainError("PWS cycle construction needs a visible fold of the upper field");
  }
  const DropResult d = drop_point(sys, alpha, fold.x, spacing, t_budget);
  PwsCycle c;
  c.x_fold = fold.x;
  c.x_drop = d.x_drop;
  c.flight_time = d.flight_time;
  const double lo = std::min(d.x_drop, fold.x), hi = std::max(d.x_drop, fold.x);
  // The sliding segment must carry the flow from the drop point back to the fold.
  const double probe = d.x_drop + 0.5 * (fold.x - d.x_drop);
  if (classify_point(sys, probe, alpha) != PointType::Sliding) {
    throw DetectionError("no PWS cycle: drop point is not in the sliding region");
  }
  for (const auto& e : sliding_equilibria(sys, alpha, {lo, hi})) {
    if (e.x > lo + 1e-12 && e.x < hi - 1e-12) {
      std::ostringstream os;
      os << "no PWS cycle: sliding equilibrium p_s at x = " << e.x << " lies inside the sliding segment";
      throw DetectionError(os.str());
    }
  }
  if ((sliding_field(sys, probe, alpha) > 0.0) != (fold.x > d.x_drop)) {
    throw DetectionError("no PWS cycle: sliding flow points away from the fold");
  }
  c.points = d.arc;
  const int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / spacing)));
  double t_slide = 0.0;
  double prev = 1.0 / sliding_field(sys, d.x_drop, alpha);
  for (int i = 1; i <= n; ++i) {
    const double x = d.x_drop + (fold.x - d.x_drop) * i / n;
    c.points.push_back({x, 0.0});
    if (i < n) {
      const double cur = 1.0 / sliding_field(sys, x, alpha);
      t_slide += 0.5 * (prev + cur) * (fold.x - d.x_drop) / n;
      prev = cur;
    }
  }
  c.points.back() = c.points.front();
  c.sliding_time = t_slide;
  return c;
}

}  // namespace regbf::filippov
