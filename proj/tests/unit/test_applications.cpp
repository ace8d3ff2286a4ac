#include <cmath>

#include <catch_amalgamated.hpp>

#include "regbf/applications.hpp"
#include "regbf/errors.hpp"
#include "support/generators.hpp"

using Catch::Approx;
namespace app = regbf::applications;

TEST_CASE("Gause closed forms", "[applications][gause]") {
  const app::GauseParams p;
  CHECK(app::gause_mu_bf(p) == Approx(0.5).epsilon(1e-15));
  CHECK(app::gause_h_star(p) == Approx(1.4494897427831779).epsilon(1e-14));
  const auto eq = app::gause_equilibrium(p);
  CHECK(eq.x == Approx(1.25));
  CHECK(eq.y == Approx(0.3));
  CHECK(app::gause_response(p, 0.0) == Approx(0.2 / 1.1));
  app::GauseParams bad;
  bad.h = 3.0;
  CHECK_THROWS_AS(app::gause_mu_bf(bad), regbf::DomainError);
  bad = {};
  bad.r = -1.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("regularized Gause field interpolates prey-only and full dynamics", "[applications][gause]") {
  const app::GauseParams p;
  const auto reg = regbf::make_builtin("sqrt_sigmoid");
  const auto sys = app::gause_pws(p);
  regbf::testing::Gen gen(53);
  for (int i = 0; i < 200; ++i) {
    const double x = gen.uniform(0.1, 3.0);
    const double y = gen.uniform(0.1, 2.0);
    const auto up = app::gause_field(p, reg, x, y, 1e-7);
    const auto zp = sys.zplus({x, y}, p.mu);
    CHECK(up.x == Approx(zp.x).margin(1e-9));
    CHECK(up.y == Approx(zp.y).margin(1e-9));
    const auto lo = app::gause_field(p, reg, x, -y, 1e-7);
    const auto zm = sys.zminus({x, -y}, p.mu);
    CHECK(lo.x == Approx(zm.x).margin(1e-9));
    CHECK(lo.y == Approx(zm.y).margin(1e-9));
  }
}

TEST_CASE("Gause Hopf value approaches the boundary focus", "[applications][gause]") {
  const app::GauseParams p;
  const auto reg = regbf::make_builtin("sqrt_sigmoid");
  const double a = app::gause_hopf(p, reg, 1e-3).param;
  const double b = app::gause_hopf(p, reg, 1e-4).param;
  CHECK(std::abs(b - 0.5) < std::abs(a - 0.5));
  CHECK(a < 0.5);
}

TEST_CASE("Gause prey escape for small predator populations", "[applications][gause]") {
  const app::GauseParams p;
  const auto reg = regbf::make_builtin("sqrt_sigmoid");
  CHECK(app::gause_escapes(p, reg, 1e-3, {0.05, 1.0}));
  const auto eq = app::gause_equilibrium_check(p, reg, 1e-3);
  CHECK(eq.eigenvalues.max_real() > 0.0);
  CHECK_FALSE(eq.attracting);
}

TEST_CASE("Stribeck law", "[applications][stickslip]") {
  const app::StickSlipParams p;
  CHECK(app::stribeck(p, 0.0) == 1.0);
  CHECK(app::stribeck(p, 1.0) == Approx(0.5));
  CHECK(app::stribeck_deriv(p, 1.0) == Approx(0.0).margin(1e-15));
  CHECK(app::stribeck_deriv(p, 0.0) == Approx(-0.75));
}

TEST_CASE("stick-slip model requires an odd regularization", "[applications][stickslip]") {
  CHECK_NOTHROW(app::StickSlipModel({}, regbf::make_builtin("arctan_sigmoid")));
  CHECK_THROWS_AS(app::StickSlipModel({}, regbf::make_expression("(1 + s/sqrt(s^2 + 1))/2", 2, 0.25, false)),
                  regbf::ConfigError);
  CHECK_THROWS_AS(app::StickSlipModel({}, regbf::make_expression("(1 + tanh(s + 0.1))/2", 1, 1.0, true)),
                  regbf::ConfigError);
}

TEST_CASE("stick-slip field is symmetric under (x, y) -> (-x, -y) at alpha = 0", "[applications][stickslip][property]") {
  const app::StickSlipModel model({}, regbf::make_builtin("sqrt_sigmoid"));
  regbf::testing::Gen gen(59);
  for (int i = 0; i < 300; ++i) {
    const double x = gen.uniform(-2, 2), y = gen.uniform(-0.1, 0.1);
    const auto a = model.field(x, y, 0.0, 1e-2);
    const auto b = model.field(-x, -y, 0.0, 1e-2);
    CHECK(a.x == Approx(-b.x).margin(1e-14));
    CHECK(a.y == Approx(-b.y).margin(1e-12));
    CHECK(model.friction_dy(y, 1e-2) ==
          Approx((model.friction(y + 1e-7, 1e-2) - model.friction(y - 1e-7, 1e-2)) / 2e-7).epsilon(1e-5).margin(1e-4));
  }
}

TEST_CASE("stick-slip Hopf value scales with the regularization", "[applications][stickslip]") {
  const app::StickSlipModel model({}, regbf::make_builtin("sqrt_sigmoid"));
  const auto a = app::stickslip_alpha_ah(model, 1e-3);
  CHECK(a.numeric == Approx(a.analytic).epsilon(0.1));
  CHECK(app::stickslip_alpha_ah_prefactor(model.params(), model.reg()) > 0.0);
}
