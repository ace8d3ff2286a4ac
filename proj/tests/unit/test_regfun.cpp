#include <cmath>

#include <catch_amalgamated.hpp>

#include "regbf/errors.hpp"
#include "regbf/regfun.hpp"
#include "support/generators.hpp"

using Catch::Approx;
using regbf::make_builtin;
using regbf::make_expression;
using regbf::validate_regularization;

TEST_CASE("sqrt_sigmoid matches closed-form values", "[regfun]") {
  const auto reg = make_builtin("sqrt_sigmoid");
  CHECK(reg.k == 2);
  CHECK(reg.beta == 0.25);
  CHECK(reg(1.0) == Approx(0.85355339059327373).epsilon(1e-15));
  CHECK(reg(2.0) == Approx(0.94721359549995787).epsilon(1e-15));
  CHECK(reg(-3.0) == Approx(0.025658350974743116).epsilon(1e-14));
  CHECK(reg(10.0) == Approx(0.99751859510499452).epsilon(1e-15));
  CHECK(reg(0.0) == 0.5);
}

TEST_CASE("arctan_sigmoid matches closed-form values", "[regfun]") {
  const auto reg = make_builtin("arctan_sigmoid");
  CHECK(reg.k == 1);
  CHECK(reg.beta == Approx(1.0 / M_PI));
  CHECK(reg(1.0) == Approx(0.75).epsilon(1e-15));
  CHECK(reg(2.0) == Approx(0.85241638234956674).epsilon(1e-15));
  CHECK(reg(-3.0) == Approx(0.10241638234956674).epsilon(1e-14));
  CHECK(reg(10.0) == Approx(0.96827448256944648).epsilon(1e-15));
}

TEST_CASE("unknown builtin is a config error", "[regfun]") {
  CHECK_THROWS_AS(make_builtin("logistic"), regbf::ConfigError);
}

TEST_CASE("complement keeps relative accuracy in the far tail", "[regfun]") {
  const auto reg = make_builtin("sqrt_sigmoid");
  for (double s : {1e3, 1e5, 1e7}) {
    CHECK(reg.complement(s) * 4.0 * s * s == Approx(1.0).epsilon(1e-6));
  }
  CHECK(reg.plus_tail(0.0) == Approx(0.25));
  CHECK(reg.plus_tail(1e-4) == Approx(0.25).epsilon(1e-6));
}

TEST_CASE("builtins pass validation", "[regfun]") {
  for (const char* name : {"sqrt_sigmoid", "arctan_sigmoid"}) {
    const auto rep = validate_regularization(make_builtin(name));
    INFO(name);
    CHECK(rep.passed());
    CHECK(rep.odd_checked);
    CHECK(rep.odd_residual < 1e-12);
  }
}

TEST_CASE("expression regularization with matching tail passes", "[regfun]") {
  const auto reg = make_expression("1/2 + atan(s)/3.141592653589793", 1, 1.0 / M_PI, true);
  const auto rep = validate_regularization(reg);
  CHECK(rep.passed());
  CHECK(rep.k_fit == Approx(1.0).margin(1e-2));
}

TEST_CASE("exponential tail is rejected", "[regfun]") {
  const auto rep = validate_regularization(make_expression("(1 + tanh(s))/2", 1, 1.0));
  CHECK_FALSE(rep.passed());
  CHECK_FALSE(rep.tail_exponent_ok);
}

TEST_CASE("declared tail mismatch is reported", "[regfun]") {
  const auto rep = validate_regularization(make_expression("1/2 + atan(s)/3.141592653589793", 2, 0.25));
  CHECK_FALSE(rep.passed());
  CHECK_FALSE(rep.failures.empty());
}

TEST_CASE("regularizations are monotone with consistent derivative", "[regfun][property]") {
  regbf::testing::Gen gen(11);
  for (const char* name : {"sqrt_sigmoid", "arctan_sigmoid"}) {
    const auto reg = make_builtin(name);
    for (int i = 0; i < 500; ++i) {
      const double a = gen.uniform(-50.0, 50.0);
      const double b = a + gen.log_uniform(1e-6, 10.0);
      CHECK(reg(a) <= reg(b));
      const double h = 1e-5;
      const double fd = (reg(a + h) - reg(a - h)) / (2 * h);
      CHECK(reg.deriv(a) == Approx(fd).epsilon(1e-6).margin(1e-10));
      CHECK(reg(a) + reg(-a) == Approx(1.0).epsilon(1e-14));
      CHECK(reg(a) + reg.complement(a) == Approx(1.0).epsilon(1e-14));
    }
  }
}
