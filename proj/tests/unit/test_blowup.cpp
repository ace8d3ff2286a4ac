#include <cmath>

#include <catch_amalgamated.hpp>

#include "regbf/blowup.hpp"
#include "regbf/errors.hpp"
#include "support/generators.hpp"

using Catch::Approx;
namespace bu = regbf::blowup;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("cylinder chart", "[blowup]") {
  const auto pt = bu::cyl_chart_forward(0.3, 0.02, 1e-4);
  CHECK(pt.coords[2] == Approx(5e-3));
  const auto back = bu::cyl_chart_inverse(pt);
  CHECK(back[0] == 0.3);
  CHECK(back[1] == 0.02);
  CHECK(back[2] == Approx(1e-4));
  CHECK_THROWS_AS(bu::cyl_chart_forward(0.0, -0.1, 1e-3), regbf::OutOfChartError);
}

TEST_CASE("composite chart rejects points outside its domain", "[blowup]") {
  CHECK_THROWS_AS(bu::composite_inverse(1, 0.1, 0.0, 1e-3, 0.0), regbf::OutOfChartError);
  CHECK_THROWS_AS(bu::composite_forward(1, 0.1, -1.0, 1.0, 0.0), regbf::OutOfChartError);
  CHECK_THROWS_AS(bu::composite_forward(0, 0.1, 1.0, 1.0, 0.0), regbf::DomainError);
}

TEST_CASE("composite chart scalings", "[blowup]") {
  // nu1 = rho1 = 1 is the identity slice.
  const auto o = bu::composite_forward(2, 0.4, 1.0, 1.0, 0.7);
  CHECK(o.x == 0.4);
  CHECK(o.y == 1.0);
  CHECK(o.eps == 1.0);
  CHECK(o.mu == 0.7);
  // mu_hat is mu / eps^(k/(k+1)).
  const auto c = bu::composite_inverse(1, 0.01, 0.02, 1e-4, 3e-2);
  CHECK(c.mu_hat == Approx(3.0));
}

TEST_CASE("composite chart round trip", "[blowup][property]") {
  regbf::testing::Gen gen(23);
  for (int i = 0; i < 2000; ++i) {
    const int k = gen.integer(1, 3);
    const double x1 = gen.uniform(-3.0, 3.0);
    const double nu1 = gen.uniform(0.05, 1.0);
    const double rho1 = gen.uniform(0.2, 2.0);
    const double mu_hat = gen.uniform(-2.0, 2.0);
    const auto o = bu::composite_forward(k, x1, nu1, rho1, mu_hat);
    const auto c = bu::composite_inverse(k, o.x, o.y, o.eps, o.mu);
    INFO("k = " << k << " x1 = " << x1 << " nu1 = " << nu1 << " rho1 = " << rho1);
    CHECK(rel(c.x1, x1) < 1e-10);
    CHECK(rel(c.nu1, nu1) < 1e-10);
    CHECK(rel(c.rho1, rho1) < 1e-10);
    CHECK(rel(c.mu_hat, mu_hat) < 1e-10);
  }
}

TEST_CASE("sphere chart transitions invert each other", "[blowup][property]") {
  regbf::testing::Gen gen(29);
  const bu::ChartId targets[] = {bu::ChartId::calK1, bu::ChartId::calK2, bu::ChartId::calK3};
  int checked = 0, outside = 0;
  for (int i = 0; i < 500; ++i) {
    const int k = gen.integer(1, 3);
    const auto base = bu::cyl_chart_forward(gen.uniform(-1.0, 1.0), gen.uniform(0.05, 1.0), gen.uniform(1e-3, 0.5));
    for (const auto a : targets) {
      for (const auto b : targets) {
        try {
          const auto pa = bu::sphere_chart_transform(base, a, k);
          const auto pb = bu::sphere_chart_transform(pa, b, k);
          const auto back = bu::sphere_chart_transform(pb, bu::ChartId::K1_cyl, k);
          INFO(bu::to_string(a) << " -> " << bu::to_string(b) << " k = " << k);
          for (int j = 0; j < 3; ++j) CHECK(rel(back.coords[j], base.coords[j]) < 1e-12);
          ++checked;
        } catch (const regbf::OutOfChartError&) {
          ++outside;
        }
      }
    }
  }
  CHECK(checked > 2000);
  CHECK(outside > 0);
}

TEST_CASE("desingularized field", "[blowup]") {
  bu::DesingParams p{1, 1.0, 1.0, 1.0, -1.0, 0.5};
  // On rho1 = 0 only the layer dynamics k x1 (beta + x1) remain.
  const auto v0 = bu::desing_field(p, 0.5, 0.0);
  CHECK(v0.x == Approx(0.75));
  CHECK(v0.y == 0.0);
  const auto v = bu::desing_field(p, -0.5, 0.8);
  const double rk = std::pow(0.8, 2);
  CHECK(v.x == Approx(rk * (2.0 + 0.5 * 0.8 - 0.5 - rk) - 0.25));
  CHECK(v.y == Approx(0.8 * 0.5));
  CHECK(bu::time_desing_factor(2, 0.5) == Approx(std::pow(0.5, 6)));
  CHECK_THROWS_AS(bu::desing_field(p, 0.0, -0.1), regbf::DomainError);
}

TEST_CASE("desingularized Jacobian matches finite differences", "[blowup][property]") {
  regbf::testing::Gen gen(31);
  for (int i = 0; i < 300; ++i) {
    bu::DesingParams p{gen.integer(1, 3), gen.uniform(0.1, 1.0), 1.0, 1.0, gen.uniform(-1.0, 1.0),
                       gen.uniform(-1.0, 2.0)};
    const double x1 = gen.uniform(-2.0, 1.0);
    const double r = gen.uniform(0.1, 1.5);
    const auto J = bu::desing_jacobian(p, x1, r);
    const double h = 1e-6;
    const auto fx = 0.5 / h * (bu::desing_field(p, x1 + h, r) - bu::desing_field(p, x1 - h, r));
    const auto fr = 0.5 / h * (bu::desing_field(p, x1, r + h) - bu::desing_field(p, x1, r - h));
    CHECK(J.a == Approx(fx.x).epsilon(1e-6).margin(1e-7));
    CHECK(J.c == Approx(fx.y).epsilon(1e-6).margin(1e-7));
    CHECK(J.b == Approx(fr.x).epsilon(1e-6).margin(1e-7));
    CHECK(J.d == Approx(fr.y).epsilon(1e-6).margin(1e-7));
  }
}

TEST_CASE("pushforward converges to the desingularized field as nu1 vanishes", "[blowup]") {
  for (const char* name : {"arctan_sigmoid", "sqrt_sigmoid"}) {
    const auto reg = regbf::make_builtin(name);
    regbf::normalform::NormalFormParams nf;
    nf.gamma = -0.5;
    const bu::DesingParams dp{reg.k, reg.beta, nf.tau, nf.delta, nf.gamma, 0.8};
    const double x1 = -0.3, rho1 = 0.9;
    const auto target = bu::desing_field(dp, x1, rho1);
    double prev = 1.0;
    for (double nu1 : {3e-1, 1e-1, 3e-2}) {
      const auto v = bu::pushforward_desing(nf, reg, x1, nu1, rho1, 0.8);
      const double err = std::max(std::abs(v.x - target.x), std::abs(v.y - target.y));
      INFO(name << " nu1 = " << nu1);
      CHECK(err <= std::max(prev, 1e-13));
      prev = err;
    }
    CHECK(prev < 1e-4);
  }
}
