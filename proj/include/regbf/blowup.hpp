#pragma once

#include <array>
#include <cstddef>

#include "regbf/normalform.hpp"
#include "regbf/regfun.hpp"
#include "regbf/types.hpp"

namespace regbf::blowup {

struct DesingParams {
  int k{1};
  double beta{1.0};
  double tau{1.0};
  double delta{1.0};
  double gamma{0.0};
  double mu_hat{0.0};

  void validate() const;
};

// K1_cyl: (x, r1, eps1). calK1: (x1, r1, rho1). calK2: (x2, eps2, rho2). calK3: (r3, eps3, rho3).
// composite: (x1, nu1, rho1, mu_hat).
enum class ChartId { K1_cyl, calK1, calK2, calK3, composite };
const char* to_string(ChartId c);

struct ChartPoint {
  ChartId chart{ChartId::K1_cyl};
  std::array<double, 4> coords{};
  std::size_t size() const { return chart == ChartId::composite ? 4 : 3; }
};

ChartPoint cyl_chart_forward(double x, double y, double eps);
// Returns (x, y, eps).
std::array<double, 3> cyl_chart_inverse(const ChartPoint& pt);

// Transitions between the calK charts and to/from the K1_cyl chart they cover.
ChartPoint sphere_chart_transform(const ChartPoint& pt, ChartId target, int k);

struct Composite {
  double x1{0.0}, nu1{0.0}, rho1{0.0}, mu_hat{0.0};
};
struct Original {
  double x{0.0}, y{0.0}, eps{0.0}, mu{0.0};
};

Original composite_forward(int k, double x1, double nu1, double rho1, double mu_hat);
Composite composite_inverse(int k, double x, double y, double eps, double mu);

Vec2 desing_field(const DesingParams& p, double x1, double rho1);
Mat2 desing_jacobian(const DesingParams& p, double x1, double rho1);

// Chart K1 field (x', r1', eps1').
std::array<double, 3> k1_cylinder_field(const normalform::NormalFormParams& p, const RegularizationFunction& reg,
                                        double x, double r1, double eps1, double mu);

double time_desing_factor(int k, double rho1);

// Pushforward of the full regularized field through the composite chart at fixed (eps, mu),
// rescaled to desingularized time. Returns (x1', rho1').
Vec2 pushforward_desing(const normalform::NormalFormParams& p, const RegularizationFunction& reg, double x1,
                        double nu1, double rho1, double mu_hat);

}  // namespace regbf::blowup
