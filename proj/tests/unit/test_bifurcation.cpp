#include <cmath>

#include <catch_amalgamated.hpp>

#include "regbf/bifurcation.hpp"
#include "regbf/errors.hpp"
#include "support/generators.hpp"

using Catch::Approx;
namespace bf = regbf::bifurcation;

TEST_CASE("analytic curves at reference constants", "[bifurcation]") {
  CHECK(bf::hopf_curve_hat(-1.0, {2, 0.25, 1.0, 1.0}) == Approx(0.3968502629920499).epsilon(1e-14));
  CHECK(bf::sn_curve_hat(0.5, {1, 1.0, 1.0, 1.0}) == Approx(1.4142135623730951).epsilon(1e-14));
  const auto bt = bf::bt_point_hat({2, 1.0, 1.0, 1.0});
  CHECK(bt.first == Approx(1.8898815748423097).epsilon(1e-14));
  CHECK(bt.second == 1.0);
  CHECK_THROWS_AS(bf::sn_curve_hat(-0.1, {1, 1.0, 1.0, 1.0}), regbf::DomainError);
  CHECK_THROWS_AS(bf::hopf_curve_hat(1.5, {1, 1.0, 1.0, 1.0}), regbf::DomainError);
}

TEST_CASE("Hopf and saddle-node curves meet at the BT point", "[bifurcation][property]") {
  regbf::testing::Gen gen(37);
  for (int i = 0; i < 200; ++i) {
    const bf::DesingConstants c{gen.integer(1, 4), gen.uniform(0.05, 2.0), gen.uniform(0.3, 3.0),
                                gen.uniform(0.3, 3.0)};
    const auto [mu_bt, g_bt] = bf::bt_point_hat(c);
    CHECK(bf::hopf_curve_hat(g_bt, c) == Approx(mu_bt).epsilon(1e-12));
    CHECK(bf::sn_curve_hat(g_bt, c) == Approx(mu_bt).epsilon(1e-12));
  }
}

TEST_CASE("first Lyapunov coefficient is negative below the BT point", "[bifurcation]") {
  const bf::DesingConstants c{2, 0.25, 1.0, 1.0};
  for (double g : {-2.0, -1.0, 0.0, 0.5, 0.9}) CHECK(bf::lyapunov_l1(g, c) < 0.0);
  CHECK(bf::lyapunov_l1(0.0, {1, 1.0, 1.0, 1.0}) == Approx(-0.375));
  CHECK_THROWS_AS(bf::lyapunov_l1(1.0, {1, 1.0, 1.0, 1.0}), regbf::DomainError);
}

TEST_CASE("numeric bifurcation values match the closed forms", "[bifurcation]") {
  for (int k : {1, 2, 3}) {
    const bf::DesingConstants c{k, k == 1 ? 1.0 / M_PI : 0.25, 1.0, 1.0};
    for (double g : {-1.0, 0.0, 0.5}) {
      INFO("k = " << k << " gamma = " << g);
      CHECK(bf::hopf_numeric(c, g) == Approx(bf::hopf_curve_hat(g, c)).epsilon(1e-8).margin(1e-10));
    }
    const auto sn = bf::sn_numeric(c, 0.5);
    CHECK(sn.mu_hat == Approx(bf::sn_curve_hat(0.5, c)).epsilon(1e-8));
    const auto bt = bf::bt_numeric(c);
    CHECK(bt.mu_hat == Approx(bf::bt_point_hat(c).first).epsilon(1e-6));
    CHECK(bt.gamma == Approx(1.0).epsilon(1e-6));
    const auto [mu_bt, g_bt] = bf::bt_point_hat(c);
    CHECK(bf::bt_residual_at(c, mu_bt, g_bt) < 1e-10);
  }
}

TEST_CASE("equilibria solve the rho polynomial", "[bifurcation][property]") {
  regbf::testing::Gen gen(41);
  for (int i = 0; i < 200; ++i) {
    const int k = gen.integer(1, 3);
    regbf::blowup::DesingParams p{k, 0.5, 1.0, 1.0, gen.uniform(-1.0, 1.0), gen.uniform(-1.0, 3.0)};
    for (const auto& e : bf::equilibria_desing(p)) {
      CHECK(e.x1 == Approx(-p.beta));
      const auto v = regbf::blowup::desing_field(p, e.x1, e.rho1);
      CHECK(std::abs(v.x) < 1e-10);
      CHECK(std::abs(v.y) < 1e-10);
    }
  }
}

TEST_CASE("eps-scale curves", "[bifurcation]") {
  const bf::DesingConstants c{1, 1.0, 1.0, 1.0};
  const auto cur = bf::eps_scale_curves(0.5, 1e-4, c);
  REQUIRE(cur.mu_ah);
  REQUIRE(cur.mu_sn);
  CHECK(*cur.mu_sn == Approx(1.4142135623730951e-2));
  CHECK_FALSE(bf::eps_scale_curves(-0.5, 1e-4, c).mu_sn);
}

TEST_CASE("clustered grid refines towards the center", "[bifurcation]") {
  const auto g = bf::clustered_grid(1.0, 0.0, -1.0);
  REQUIRE(g.size() > 10);
  CHECK(g.front() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);
}

TEST_CASE("Hopf amplitude grows like the square root of the offset", "[bifurcation]") {
  const auto law = bf::hopf_amplitude_law({1, 1.0, 1.0, 1.0}, -0.5, 0.05, 6);
  REQUIRE(law.amplitudes.size() == 6);
  CHECK(law.mu_ah == Approx(bf::hopf_curve_hat(-0.5, {1, 1.0, 1.0, 1.0})).epsilon(1e-8));
  CHECK(law.fit.r_squared > 0.99);
  CHECK(law.fit.slope > 0.0);
  for (double f : law.floquets) CHECK(f < 1.0);
}

TEST_CASE("diagram contains all curves", "[bifurcation]") {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(-1.0 + 0.19 * i);
  const auto d = bf::build_diagram({1, 1.0, 1.0, 1.0}, grid, false);
  CHECK(d.ah_curve.size() == grid.size());
  CHECK(d.sn_curve.size() == 5);
  CHECK(d.bt_point.second == 1.0);
}
