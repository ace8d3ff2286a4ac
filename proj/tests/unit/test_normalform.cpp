#include <cmath>

#include <catch_amalgamated.hpp>

#include "regbf/errors.hpp"
#include "regbf/filippov.hpp"
#include "regbf/normalform.hpp"
#include "support/generators.hpp"

using Catch::Approx;
namespace nf = regbf::normalform;

TEST_CASE("limit fields", "[normalform]") {
  nf::NormalFormParams p;
  p.gamma = -0.5;
  const auto up = nf::upper_field(p, 0.3, 0.2, 0.1);
  CHECK(up.x == Approx(0.1 + 0.3 - 0.2));
  CHECK(up.y == Approx(0.3));
  const auto lo = nf::lower_field(p);
  CHECK(lo.x == Approx(1.5));
  CHECK(lo.y == 1.0);
  p.sign_lower = -1;
  CHECK(nf::lower_field(p).y == -1.0);
}

TEST_CASE("parameter validation", "[normalform]") {
  nf::NormalFormParams p;
  p.sign_lower = 0;
  CHECK_THROWS(p.validate());
  p.sign_lower = 1;
  p.theta2.terms.push_back({0, 0, 2, 1.0});
  CHECK_THROWS(p.validate());
}

TEST_CASE("boundary equilibria", "[normalform]") {
  nf::NormalFormParams p;
  p.gamma = 1.0;
  const auto eq = nf::pws_equilibria(p, 0.2);
  REQUIRE(eq.focus);
  CHECK(eq.focus->x == Approx(0.0).margin(1e-14));
  CHECK(eq.focus->y == Approx(0.2));
  REQUIRE(eq.sliding_eq);
  CHECK(eq.sliding_eq->x == Approx(-0.2));
  const auto fold = nf::upper_fold(p, 0.2);
  CHECK(fold.x == Approx(0.0).margin(1e-12));
  CHECK(fold.second_lie == Approx(0.2));
}

TEST_CASE("regularized field interpolates the limit fields", "[normalform][property]") {
  regbf::testing::Gen gen(17);
  const auto reg = regbf::make_builtin("sqrt_sigmoid");
  nf::NormalFormParams p;
  p.theta1.terms.push_back({2, 0, 0, 0.3});
  p.theta2.terms.push_back({1, 1, 0, -0.2});
  const auto sys = nf::pws_limit(p);
  for (int i = 0; i < 300; ++i) {
    const double x = gen.uniform(-1.0, 1.0);
    const double y = gen.uniform(0.05, 1.0);
    const double mu = gen.uniform(-0.2, 0.2);
    const double eps = 1e-7;
    const auto f = nf::smooth_field(p, reg, x, y, mu, eps);
    const auto up = nf::upper_field(p, x, y, mu);
    CHECK(f.x == Approx(up.x).margin(1e-9));
    CHECK(f.y == Approx(up.y).margin(1e-9));
    const auto g = nf::smooth_field(p, reg, x, -y, mu, eps);
    const auto lo = nf::lower_field(p);
    CHECK(g.x == Approx(lo.x).margin(1e-9));
    CHECK(g.y == Approx(lo.y).margin(1e-9));
    // Jacobian against central differences at the layer scale.
    const double e2 = 1e-2;
    const double yl = gen.uniform(-0.05, 0.05);
    const auto J = nf::smooth_jacobian(p, reg, x, yl, mu, e2);
    const double h = 1e-6;
    const auto fx = 0.5 / h * (nf::smooth_field(p, reg, x + h, yl, mu, e2) - nf::smooth_field(p, reg, x - h, yl, mu, e2));
    const auto fy = 0.5 / h * (nf::smooth_field(p, reg, x, yl + h, mu, e2) - nf::smooth_field(p, reg, x, yl - h, mu, e2));
    CHECK(J.a == Approx(fx.x).epsilon(1e-5).margin(1e-6));
    CHECK(J.c == Approx(fx.y).epsilon(1e-5).margin(1e-6));
    CHECK(J.b == Approx(fy.x).epsilon(1e-5).margin(1e-5));
    CHECK(J.d == Approx(fy.y).epsilon(1e-5).margin(1e-5));
  }
}

TEST_CASE("closed-form sliding field agrees with the Filippov construction", "[normalform][property]") {
  regbf::testing::Gen gen(19);
  for (int i = 0; i < 200; ++i) {
    nf::NormalFormParams p;
    p.gamma = gen.uniform(-2.0, 0.9);
    p.tau = gen.uniform(0.5, 2.0);
    const auto sys = nf::pws_limit(p);
    const double mu = gen.uniform(-0.3, 0.3);
    const double x = gen.uniform(-1.5, -0.01);
    CHECK(regbf::filippov::classify_point(sys, x, mu) == regbf::filippov::PointType::Sliding);
    CHECK(nf::filippov_field_nf(p, x, mu) ==
          Approx(regbf::filippov::sliding_field(sys, x, mu)).epsilon(1e-12).margin(1e-14));
  }
}
