#include <cmath>

#include <catch_amalgamated.hpp>

#include "regbf/applications.hpp"
#include "regbf/errors.hpp"
#include "regbf/filippov.hpp"
#include "regbf/normalform.hpp"
#include "support/generators.hpp"

using Catch::Approx;
namespace app = regbf::applications;
namespace fl = regbf::filippov;

TEST_CASE("stick-slip switching line structure", "[filippov]") {
  const auto sys = app::stickslip_pws({});
  const auto folds = fl::find_folds(sys, {-3.0, 3.0}, 0.5);
  REQUIRE(folds.size() == 2);
  CHECK(folds[0].x == Approx(-1.0).margin(1e-10));
  CHECK(folds[1].x == Approx(1.0).margin(1e-10));
  CHECK(fl::classify_point(sys, 0.0, 0.5) == fl::PointType::Sliding);
  CHECK(fl::classify_point(sys, 2.0, 0.5) == fl::PointType::Crossing);
  CHECK(fl::classify_point(sys, -2.0, 0.5) == fl::PointType::Crossing);
  CHECK(fl::sliding_field(sys, 0.3, 0.5) == Approx(-0.5));
  CHECK(fl::sliding_equilibria(sys, 0.5, {-3.0, 3.0}).empty());
}

TEST_CASE("Gause fold, boundary focus and virtual sliding equilibrium", "[filippov]") {
  const app::GauseParams p;
  const auto sys = app::gause_pws(p);
  const auto folds = fl::find_folds(sys, {0.01, 5.0}, 0.2);
  REQUIRE(folds.size() == 1);
  CHECK(folds[0].x == Approx(1.1).epsilon(1e-10));

  const auto bf = fl::detect_bf(sys, {0.05, 1.0});
  REQUIRE(bf);
  CHECK(bf->alpha_bf == Approx(0.5).epsilon(1e-10));
  CHECK(bf->z_bf.x == Approx(1.25).epsilon(1e-10));
  CHECK(bf->A == Approx(0.1).epsilon(1e-8));
  CHECK(bf->B == Approx(0.38729833462074170).epsilon(1e-8));
  CHECK(fl::classify_bf(sys, *bf, 0.05).type == fl::BfType::BF3);

  CHECK(fl::sliding_equilibria(sys, 0.2, {0.01, 5.0}).empty());
  const auto all = fl::sliding_equilibria(sys, 0.2, {0.01, 5.0}, 4001, true);
  REQUIRE(all.size() == 1);
  CHECK(all[0].x == Approx(0.5).epsilon(1e-10));
  CHECK_FALSE(all[0].admissible);
  CHECK(all[0].stability == fl::Stability::Stable);
}

TEST_CASE("normal form boundary focus is BF2 for positive gamma", "[filippov]") {
  regbf::normalform::NormalFormParams p;
  p.gamma = 1.0;
  const auto sys = regbf::normalform::pws_limit(p);
  const auto bf = fl::detect_bf(sys, {-0.5, 0.5});
  REQUIRE(bf);
  CHECK(bf->alpha_bf == Approx(0.0).margin(1e-10));
  const auto cls = fl::classify_bf(sys, *bf, 0.1);
  CHECK(cls.type == fl::BfType::BF2);
  REQUIRE(cls.x_sliding_eq);
  CHECK(*cls.x_sliding_eq == Approx(-0.1).epsilon(1e-9));
}

TEST_CASE("drop point of the grazing orbit", "[filippov]") {
  const regbf::normalform::NormalFormParams p;
  const auto cyc = regbf::normalform::build_pws_cycle(p, 0.1);
  CHECK(cyc.x_fold == Approx(0.0).margin(1e-12));
  CHECK(cyc.x_drop == Approx(-1.218574424300824).margin(1e-6));
  CHECK(cyc.flight_time > 0.0);
  CHECK(cyc.sliding_time > 0.0);
}

TEST_CASE("sliding field is the tangent convex combination", "[filippov][property]") {
  regbf::testing::Gen gen(3);
  regbf::normalform::NormalFormParams nf;
  nf.gamma = 0.7;
  const std::vector<std::pair<fl::PwsSystem, double>> systems{
      {regbf::normalform::pws_limit(nf), 0.1}, {app::gause_pws({}), 0.2}, {app::stickslip_pws({}), 0.5}};
  for (const auto& [sys, alpha] : systems) {
    int hits = 0;
    for (int i = 0; i < 2000 && hits < 200; ++i) {
      const double x = gen.uniform(sys.domain.x_min, sys.domain.x_max);
      if (fl::classify_point(sys, x, alpha) != fl::PointType::Sliding) continue;
      ++hits;
      const double chi = fl::sliding_weight(sys, x, alpha);
      const auto zp = sys.zplus({x, 0.0}, alpha);
      const auto zm = sys.zminus({x, 0.0}, alpha);
      INFO(sys.name << " x = " << x);
      CHECK(chi >= 0.0);
      CHECK(chi <= 1.0);
      CHECK(chi * zp.y + (1 - chi) * zm.y == Approx(0.0).margin(1e-12));
      CHECK(chi * zp.x + (1 - chi) * zm.x == Approx(fl::sliding_field(sys, x, alpha)).epsilon(1e-12).margin(1e-13));
    }
    CHECK(hits > 20);
  }
}

TEST_CASE("tangency classification agrees with located folds", "[filippov][property]") {
  regbf::testing::Gen gen(5);
  const auto sys = app::gause_pws({});
  for (int i = 0; i < 50; ++i) {
    const double mu = gen.uniform(0.05, 0.45);
    const auto folds = fl::find_folds(sys, {0.01, 5.0}, mu);
    REQUIRE(folds.size() == 1);
    CHECK(std::abs(fl::lie_plus(sys, folds[0].x, mu)) < 1e-10);
    CHECK(fl::classify_point(sys, folds[0].x - 1e-3, mu) == fl::PointType::Crossing);
    CHECK(fl::classify_point(sys, folds[0].x + 1e-3, mu) == fl::PointType::Sliding);
  }
}

TEST_CASE("invalid system is rejected", "[filippov]") {
  fl::PwsSystem sys;
  CHECK_THROWS_AS(sys.validate(), regbf::ConfigError);
}
