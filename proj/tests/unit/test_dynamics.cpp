#include <cmath>
#include <numbers>

#include <catch_amalgamated.hpp>

#include "regbf/dynamics.hpp"
#include "regbf/errors.hpp"
#include "regbf/normalform.hpp"
#include "support/generators.hpp"

using Catch::Approx;
namespace dyn = regbf::dynamics;
using regbf::Vec2;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

dyn::PlanarField rotation() {
  return [](const Vec2& z) { return Vec2{-z.y, z.x}; };
}

// Stable unit cycle with period 2 pi.
dyn::PlanarField hopf_normal_form() {
  return [](const Vec2& z) {
    const double r2 = z.x * z.x + z.y * z.y;
    return Vec2{z.x - z.y - z.x * r2, z.x + z.y - z.y * r2};
  };
}

regbf::Polyline circle(double r, int n) {
  regbf::Polyline out;
  for (int i = 0; i <= n; ++i) out.push_back({r * std::cos(kTwoPi * i / n), r * std::sin(kTwoPi * i / n)});
  return out;
}

}  // namespace

TEST_CASE("adaptive integration of a rotation", "[dynamics][ode]") {
  dyn::IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  const auto tr = dyn::integrate(rotation(), {1.0, 0.0}, {0.0, kTwoPi}, cfg);
  CHECK(tr.t.back() == Approx(kTwoPi));
  CHECK(dist(tr.z.back(), {1.0, 0.0}) < 1e-9);
  CHECK(tr.steps_accepted > 0);
}

TEST_CASE("events are located on the section", "[dynamics][ode]") {
  dyn::IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  const dyn::Section sec{dyn::SectionKind::Horizontal, 0.0, dyn::Direction::Increasing, {0.0, 10.0}};
  dyn::IntegrateOptions opts;
  opts.stop_after_hits = 2;
  const auto tr = dyn::integrate(rotation(), {0.0, -1.0}, {0.0, 100.0}, cfg, {&sec, 1}, opts);
  REQUIRE(tr.hits.size() == 2);
  CHECK(tr.stopped_on_event);
  CHECK(tr.hits[0].t == Approx(0.5 * std::numbers::pi).epsilon(1e-9));
  CHECK(tr.hits[1].t == Approx(2.5 * std::numbers::pi).epsilon(1e-9));
  for (const auto& h : tr.hits) CHECK(std::abs(h.residual) <= cfg.event_tol);
}

TEST_CASE("fixed-step mode is fifth order", "[dynamics][ode]") {
  auto err = [](double h) {
    dyn::IntegratorConfig cfg;
    cfg.fixed_step = h;
    const auto tr = dyn::integrate(rotation(), {1.0, 0.0}, {0.0, 2.0}, cfg, {}, {.record = false});
    return dist(tr.z.back(), {std::cos(2.0), std::sin(2.0)});
  };
  const double ratio = err(0.1) / err(0.05);
  CHECK(ratio > 24.0);
  CHECK(ratio < 48.0);
}

TEST_CASE("time budget and step limits raise errors", "[dynamics][ode]") {
  dyn::IntegratorConfig cfg;
  cfg.t_budget = 1.0;
  CHECK_THROWS_AS(dyn::integrate(rotation(), {1.0, 0.0}, {0.0, 10.0}, cfg), dyn::BudgetError);
  cfg = {};
  cfg.max_steps = 3;
  try {
    dyn::integrate(rotation(), {1.0, 0.0}, {0.0, 100.0}, cfg);
    FAIL("no throw");
  } catch (const dyn::BudgetError& e) {
    CHECK_FALSE(e.partial().z.empty());
  }
  cfg = {};
  cfg.rel_tol = -1.0;
  CHECK_THROWS_AS(dyn::integrate(rotation(), {1.0, 0.0}, {0.0, 1.0}, cfg), regbf::ConfigError);
}

TEST_CASE("equilibrium and eigenvalues", "[dynamics]") {
  const dyn::PlanarField f = [](const Vec2& z) { return Vec2{z.x - z.y - 1.0, z.x + z.y}; };
  const dyn::PlanarJacobian J = [](const Vec2&) { return regbf::Mat2{1.0, -1.0, 1.0, 1.0}; };
  const auto eq = dyn::find_equilibrium(f, J, {0.0, 0.0});
  REQUIRE(eq);
  CHECK(eq->point.x == Approx(0.5));
  CHECK(eq->point.y == Approx(-0.5));
  CHECK(eq->eigenvalues.complex_pair());
  CHECK(eq->eigenvalues.first.real() == Approx(1.0));
  CHECK(eq->eigenvalues.first.imag() == Approx(1.0));
}

TEST_CASE("limit cycle of the Hopf normal form", "[dynamics]") {
  dyn::IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  const dyn::Section sec{dyn::SectionKind::Horizontal, 0.0, dyn::Direction::Increasing, {1e-3, 10.0}};
  const auto res = dyn::find_limit_cycle(hopf_normal_form(), sec, {0.4, 0.0}, cfg);
  REQUIRE(res.cycle);
  const auto& c = *res.cycle;
  CHECK(c.anchor.x == Approx(1.0).epsilon(1e-8));
  CHECK(c.period == Approx(kTwoPi).epsilon(1e-8));
  CHECK(c.floquet < 1e-3);
  CHECK(c.stable);
  CHECK(c.amplitude() == Approx(1.0).epsilon(1e-4));
  CHECK(c.closure_gap < 1e-8);
}

TEST_CASE("no cycle around a stable focus", "[dynamics]") {
  const dyn::PlanarField f = [](const Vec2& z) { return Vec2{-0.2 * z.x - z.y, z.x - 0.2 * z.y}; };
  const dyn::Section sec{dyn::SectionKind::Horizontal, 0.0, dyn::Direction::Increasing, {1e-3, 10.0}};
  const auto res = dyn::find_limit_cycle(f, sec, {1.0, 0.0}, {});
  CHECK_FALSE(res.cycle);
  CHECK_FALSE(res.diagnostic.empty());
}

TEST_CASE("Hausdorff distance between concentric circles", "[dynamics]") {
  const auto a = circle(1.0, 400);
  const auto b = circle(1.1, 400);
  CHECK(dyn::hausdorff(a, b) == Approx(0.1).margin(1e-3));
  CHECK(dyn::hausdorff(a, a) < 1e-12);
  const auto r = dyn::resample(a, 1e-2);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(dist(r[i], r[i - 1]) <= 1e-2 + 1e-12);
}

TEST_CASE("Hausdorff distance is a symmetric bound on point offsets", "[dynamics][property]") {
  regbf::testing::Gen gen(43);
  for (int i = 0; i < 50; ++i) {
    regbf::Polyline a, b;
    const int n = gen.integer(3, 30);
    for (int j = 0; j < n; ++j) a.push_back({gen.uniform(-1, 1), gen.uniform(-1, 1)});
    const double shift = gen.uniform(0.0, 0.5);
    for (const auto& p : a) b.push_back({p.x + shift, p.y});
    const double h = dyn::hausdorff(a, b, 1e-2);
    CHECK(h == Approx(dyn::hausdorff(b, a, 1e-2)).margin(1e-12));
    CHECK(h <= shift + 1e-12);
  }
}

TEST_CASE("regularized normal form cycle shadows the PWS cycle", "[dynamics]") {
  const regbf::normalform::NormalFormParams p;
  const auto reg = regbf::make_builtin("sqrt_sigmoid");
  const auto res = dyn::regularized_cycle(p, reg, 0.1, 1e-3);
  REQUIRE(res.cycle);
  const auto pws = regbf::normalform::build_pws_cycle(p, 0.1);
  CHECK(dyn::hausdorff(res.cycle->points, pws.points) < 0.1);
  CHECK(res.cycle->stable);
}
