#include <cmath>
#include <vector>

#include <catch_amalgamated.hpp>

#include "regbf/errors.hpp"
#include "regbf/expression.hpp"
#include "support/generators.hpp"

using Catch::Approx;
using regbf::Expression;

TEST_CASE("operator precedence and associativity", "[expression]") {
  CHECK(Expression::parse("1 + 2 * 3").eval(0.0) == 7.0);
  CHECK(Expression::parse("2^3^2").eval(0.0) == 512.0);
  CHECK(Expression::parse("-2^2").eval(0.0) == -4.0);
  CHECK(Expression::parse("(1 + 2) * 3").eval(0.0) == 9.0);
  CHECK(Expression::parse("8 / 4 / 2").eval(0.0) == 1.0);
  CHECK(Expression::parse("1 - 2 - 3").eval(0.0) == -4.0);
  CHECK(Expression::parse("2.5e-1").eval(0.0) == 0.25);
}

TEST_CASE("functions and variables", "[expression]") {
  const auto e = Expression::parse("sqrt(abs(s)) + exp(0) + atan(1)*4 + log(1) + tanh(0)");
  CHECK(e.eval(-4.0) == Approx(2.0 + 1.0 + M_PI));
  const auto xy = Expression::parse("x*y - a", {"x", "y", "a"});
  const double v[] = {2.0, 3.0, 1.0};
  CHECK(xy.eval(v) == 5.0);
  CHECK(xy.variable_count() == 3);
}

TEST_CASE("malformed expressions report a position", "[expression]") {
  CHECK_THROWS_AS(Expression::parse("1 +"), regbf::ParseError);
  CHECK_THROWS_AS(Expression::parse("sqrt(s"), regbf::ParseError);
  CHECK_THROWS_AS(Expression::parse("q + 1"), regbf::ParseError);
  CHECK_THROWS_AS(Expression::parse("cosh(s)"), regbf::ParseError);
  CHECK_THROWS_AS(Expression::parse("1 2"), regbf::ParseError);
  try {
    Expression::parse("(1 + s");
    FAIL("no throw");
  } catch (const regbf::ParseError& e) {
    CHECK(e.position() == 6);
  }
}

TEST_CASE("exact derivative of polynomials", "[expression]") {
  const auto e = Expression::parse("s^3 - 2*s");
  const auto [v, d] = e.eval_with_derivative(2.0);
  CHECK(v == 4.0);
  CHECK(d == 10.0);
}

TEST_CASE("forward-mode derivative matches finite differences", "[expression][property]") {
  const std::vector<const char*> exprs{"1/2 + atan(s)/3.141592653589793", "(1 + s/sqrt(s^2 + 1))/2",
                                       "exp(-s^2) * tanh(s)", "log(1 + s^2) / (2 + s^2)", "abs(s)^3 - s"};
  regbf::testing::Gen gen(7);
  for (const char* text : exprs) {
    const auto e = Expression::parse(text);
    for (int i = 0; i < 200; ++i) {
      const double s = gen.uniform(-5.0, 5.0);
      const double h = 1e-6;
      const double fd = (e.eval(s + h) - e.eval(s - h)) / (2 * h);
      const auto [v, d] = e.eval_with_derivative(s);
      INFO(text << " at s = " << s);
      CHECK(v == e.eval(s));
      CHECK(d == Approx(fd).epsilon(1e-6).margin(1e-8));
    }
  }
}
