#include <cmath>

#include <catch_amalgamated.hpp>

#include "regbf/errors.hpp"
#include "regbf/numerics.hpp"
#include "regbf/parallel.hpp"
#include "regbf/types.hpp"
#include "support/generators.hpp"

using Catch::Approx;

TEST_CASE("bracketed root", "[numerics]") {
  CHECK(regbf::find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0) == Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(regbf::find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), regbf::NumericalError);
  const auto br = regbf::sign_change_brackets([](double x) { return std::sin(x); }, 0.5, 10.0, 100);
  CHECK(br.size() == 3);
}

TEST_CASE("linear and power-law fits", "[numerics]") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const auto f = regbf::fit_line(x, y);
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.r_squared == Approx(1.0));
  const std::vector<double> e{1e-3, 1e-4, 1e-5};
  const std::vector<double> m{0.5 * std::pow(1e-3, 2.0 / 3), 0.5 * std::pow(1e-4, 2.0 / 3), 0.5 * std::pow(1e-5, 2.0 / 3)};
  CHECK(regbf::fit_power_law(e, m).slope == Approx(2.0 / 3));
}

TEST_CASE("eigenvalues of 2x2 matrices", "[numerics][property]") {
  regbf::testing::Gen gen(47);
  for (int i = 0; i < 500; ++i) {
    const regbf::Mat2 m{gen.uniform(-3, 3), gen.uniform(-3, 3), gen.uniform(-3, 3), gen.uniform(-3, 3)};
    const auto ev = regbf::eigenvalues(m);
    CHECK(std::abs((ev.first + ev.second).real() - m.trace()) < 1e-12);
    CHECK(std::abs(ev.first * ev.second - std::complex<double>(m.det())) < 1e-10);
    if (ev.complex_pair()) CHECK(ev.first.imag() > 0.0);
  }
}

TEST_CASE("Newton converges on a nonlinear system", "[numerics]") {
  auto F = [](const regbf::Vec2& z) { return regbf::Vec2{z.x * z.x + z.y * z.y - 1.0, z.x - z.y}; };
  auto J = [&](const regbf::Vec2& z) { return regbf::fd_jacobian(F, z); };
  const auto r = regbf::newton2(F, J, {1.0, 0.2});
  CHECK(r.converged);
  CHECK(r.z.x == Approx(std::sqrt(0.5)));
  CHECK(regbf::solve({2.0, 0.0, 0.0, 4.0}, {2.0, 2.0}).y == Approx(0.5));
  CHECK_THROWS_AS(regbf::solve({1.0, 2.0, 2.0, 4.0}, {1.0, 1.0}), regbf::NumericalError);
}

TEST_CASE("parallel map keeps order and propagates errors", "[numerics]") {
  const auto out = regbf::parallel_map(50, [](std::size_t i) { return static_cast<int>(i * i); }, 4);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(regbf::parallel_map(
                      5, [](std::size_t i) -> int { if (i == 3) throw regbf::NumericalError("x"); return 0; }, 2),
                  regbf::NumericalError);
}
