#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regbf/filippov.hpp"
#include "regbf/ode.hpp"
#include "regbf/regfun.hpp"
#include "regbf/types.hpp"

namespace regbf::normalform {

struct Monomial {
  int px{0};
  int py{0};
  int pmu{0};
  double coef{0.0};
};

// Polynomial in (x, y, mu).
struct Poly3 {
  std::vector<Monomial> terms;

  bool empty() const { return terms.empty(); }
  double operator()(double x, double y, double mu) const;
  double dx(double x, double y, double mu) const;
  double dy(double x, double y, double mu) const;
  double dmu(double x, double y, double mu) const;
};

struct NormalFormParams {
  double tau{1.0};
  double delta{1.0};
  double gamma{-1.0};
  int sign_lower{1};
  // theta1 of order >= 2 in (x, y, mu); theta2 of order >= 2 with no pure mu powers.
  Poly3 theta1;
  Poly3 theta2;

  void validate() const;
};

Vec2 smooth_field(const NormalFormParams& p, const RegularizationFunction& reg, double x, double y, double mu,
                  double eps);
Mat2 smooth_jacobian(const NormalFormParams& p, const RegularizationFunction& reg, double x, double y, double mu,
                     double eps);

Vec2 upper_field(const NormalFormParams& p, double x, double y, double mu);
Vec2 lower_field(const NormalFormParams& p);

filippov::PwsSystem pws_limit(const NormalFormParams& p);

double filippov_field_nf(const NormalFormParams& p, double x, double mu);

struct PwsEquilibria {
  std::optional<Vec2> focus;
  std::optional<Vec2> sliding_eq;
  std::string diagnostic;
};

PwsEquilibria pws_equilibria(const NormalFormParams& p, double mu);

// Fold of the upper field near the origin.
filippov::FoldPoint upper_fold(const NormalFormParams& p, double mu);

filippov::PwsCycle build_pws_cycle(const NormalFormParams& p, double mu, double spacing = 1e-3);

// The regularized field with (mu, eps) bound.
dynamics::PlanarField bind_field(const NormalFormParams& p, const RegularizationFunction& reg, double mu, double eps);
dynamics::PlanarJacobian bind_jacobian(const NormalFormParams& p, const RegularizationFunction& reg, double mu,
                                       double eps);

}  // namespace regbf::normalform
