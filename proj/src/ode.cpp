#include "regbf/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace regbf::dynamics {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct Dense {
  double t0{0.0}, h{0.0};
  std::array<Vec2, 5> r;

  Vec2 operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
  }
};

bool crosses(Direction dir, double g0, double g1) {
  const bool up = g0 < 0.0 && g1 >= 0.0;
  const bool down = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case Direction::Increasing: return up;
    case Direction::Decreasing: return down;
    case Direction::Both: return up || down;
  }
  return false;
}

// Illinois-modified regula falsi on the dense output, falling back to bisection.
EventHit locate(const Section& sec, const Dense& dense, double ta, double ga, double tb, double gb,
                double tol) {
  double fa = ga, fb = gb;
  int side = 0;
  double t = tb;
  Vec2 z = dense(tb);
  double g = gb;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(g) <= tol) break;
    double tn = (fa * tb - fb * ta) / (fa - fb);
    if (!(tn > ta && tn < tb) || it % 4 == 3) tn = 0.5 * (ta + tb);
    z = dense(tn);
    g = sec.value(z);
    t = tn;
    if ((g < 0.0) == (fa < 0.0)) {
      ta = tn;
      fa = g;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      tb = tn;
      fb = g;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (tb - ta <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) break;
  }
  return {0, t, z, std::abs(g)};
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0) || !(t_budget > 0.0) || !(event_tol > 0.0) ||
      layer_eps < 0.0 || fixed_step < 0.0) {
    throw ConfigError("integrator settings must be positive");
  }
}

Trajectory integrate(const PlanarField& field, Vec2 z0, Interval t_span, const IntegratorConfig& cfg,
                     std::span<const Section> events, const IntegrateOptions& opts) {
  cfg.validate();
  Trajectory traj;
  const double t_end = std::min(t_span.hi, t_span.lo + cfg.t_budget);
  const bool budget_limited = t_span.hi > t_span.lo + cfg.t_budget;
  double t = t_span.lo;
  Vec2 z = z0;
  traj.t.push_back(t);
  traj.z.push_back(z);

  auto f = [&](const Vec2& v) {
    ++traj.evaluations;
    return field(v);
  };

  Vec2 k1 = f(z);
  if (!std::isfinite(k1.x) || !std::isfinite(k1.y)) throw NumericalError("non-finite field at initial point");

  auto scale = [&](double a, double b) { return cfg.abs_tol + cfg.rel_tol * std::max(std::abs(a), std::abs(b)); };

  double h;
  if (cfg.fixed_step > 0.0) {
    h = cfg.fixed_step;
  } else if (cfg.initial_step > 0.0) {
    h = cfg.initial_step;
  } else {
    // Standard starting-step heuristic.
    const double d0 = std::hypot(z.x / scale(z.x, z.x), z.y / scale(z.y, z.y)) / std::sqrt(2.0);
    const double d1n = std::hypot(k1.x / scale(z.x, z.x), k1.y / scale(z.y, z.y)) / std::sqrt(2.0);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, cfg.max_step);
    const Vec2 z1 = z + h0 * k1;
    const Vec2 k2 = f(z1);
    const double d2 = std::hypot((k2.x - k1.x) / scale(z.x, z.x), (k2.y - k1.y) / scale(z.y, z.y)) /
                      std::sqrt(2.0) / h0;
    const double h1 = std::max(d1n, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1n, d2), 0.2);
    h = std::min(100.0 * h0, h1);
  }

  std::vector<double> gprev(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) gprev[i] = events[i].value(z);
  std::size_t valid_hits = 0;

  constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9, facl = 0.2, facr = 10.0;
  double errold = 1e-4;
  bool last_rejected = false;

  while (t < t_end) {
    if (traj.steps_accepted + traj.steps_rejected >= cfg.max_steps) {
      throw BudgetError("integration step limit exceeded", std::move(traj));
    }
    double hmax = cfg.max_step;
    if (cfg.layer_eps > 0.0 && std::abs(z.y) <= 10.0 * cfg.layer_eps) hmax = std::min(hmax, cfg.layer_eps);
    h = std::min(h, hmax);
    if (t + h > t_end) h = t_end - t;
    if (h < 1e-16 * std::max(1.0, std::abs(t))) {
      throw StiffnessError("step size underflow at t = " + std::to_string(t));
    }

    const Vec2 k2 = f(z + h * (a21 * k1));
    const Vec2 k3 = f(z + h * (a31 * k1 + a32 * k2));
    const Vec2 k4 = f(z + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2 k5 = f(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2 k6 = f(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec2 znew = z + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vec2 k7 = f(znew);
    const Vec2 errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double ex = errv.x / scale(z.x, znew.x), ey = errv.y / scale(z.y, znew.y);
    double err = std::sqrt(0.5 * (ex * ex + ey * ey));
    if (!std::isfinite(err) || !std::isfinite(znew.x) || !std::isfinite(znew.y)) err = 1e10;
    if (cfg.fixed_step > 0.0) {
      if (err >= 1e10) throw NumericalError("non-finite state in fixed-step integration");
      err = 0.0;
    }

    if (err > 1.0) {
      ++traj.steps_rejected;
      const double fac11 = std::pow(err, expo1);
      h /= std::min(1.0 / facl, fac11 / safe);
      last_rejected = true;
      continue;
    }
    ++traj.steps_accepted;

    Dense dense;
    dense.t0 = t;
    dense.h = h;
    dense.r[0] = z;
    dense.r[1] = znew - z;
    dense.r[2] = h * k1 - dense.r[1];
    dense.r[3] = dense.r[1] - h * k7 - dense.r[2];
    dense.r[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    const double tnew = t + h;

    // Events inside this step, earliest first.
    double stop_t = tnew;
    bool stop = false;
    if (!events.empty()) {
      std::vector<EventHit> step_hits;
      for (std::size_t i = 0; i < events.size(); ++i) {
        const double g1 = events[i].value(znew);
        if (crosses(events[i].direction, gprev[i], g1)) {
          EventHit hit = locate(events[i], dense, t, gprev[i], tnew, g1, cfg.event_tol);
          hit.section = i;
          if (events[i].in_window(hit.z)) step_hits.push_back(hit);
        }
        gprev[i] = g1;
      }
      std::sort(step_hits.begin(), step_hits.end(), [](const EventHit& a, const EventHit& b) { return a.t < b.t; });
      for (const auto& hit : step_hits) {
        traj.hits.push_back(hit);
        ++valid_hits;
        if (opts.stop_after_hits > 0 && valid_hits >= opts.stop_after_hits) {
          stop = true;
          stop_t = hit.t;
          break;
        }
      }
    }

    if (opts.record) {
      if (opts.sample_spacing > 0.0) {
        const Vec2 zend = stop ? dense(stop_t) : znew;
        const Vec2 zmid = dense(0.5 * (t + stop_t));
        const double len = dist(z, zmid) + dist(zmid, zend);
        const int n = static_cast<int>(std::ceil(len / opts.sample_spacing));
        for (int i = 1; i < n; ++i) {
          const double ti = t + (stop_t - t) * i / n;
          traj.t.push_back(ti);
          traj.z.push_back(dense(ti));
        }
      }
      traj.t.push_back(stop_t);
      traj.z.push_back(stop ? traj.hits.back().z : znew);
    }
    if (stop) {
      traj.stopped_on_event = true;
      if (!opts.record) {
        traj.t.push_back(stop_t);
        traj.z.push_back(traj.hits.back().z);
      }
      return traj;
    }

    // PI controller.
    const double fac11 = std::pow(std::max(err, 1e-300), expo1);
    double fac = fac11 / std::pow(errold, beta);
    fac = std::max(1.0 / facr, std::min(1.0 / facl, fac / safe));
    double hnew = cfg.fixed_step > 0.0 ? cfg.fixed_step : h / fac;
    if (last_rejected) hnew = std::min(hnew, h);
    errold = std::max(err, 1e-4);
    last_rejected = false;

    t = tnew;
    z = znew;
    k1 = k7;
    h = hnew;
  }

  if (!opts.record) {
    traj.t.push_back(t);
    traj.z.push_back(z);
  }
  if (budget_limited) throw BudgetError("time budget exhausted", std::move(traj));
  return traj;
}

}  // namespace regbf::dynamics
