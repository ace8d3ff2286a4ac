#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regbf/bifurcation.hpp"
#include "regbf/dynamics.hpp"
#include "regbf/filippov.hpp"
#include "regbf/ode.hpp"
#include "regbf/regfun.hpp"
#include "regbf/types.hpp"

namespace regbf::applications {

// Predator x, shifted prey y (prey minus refuge threshold mu).
struct GauseParams {
  double r{1.0};
  double lambda{1.0};
  double h{0.5};
  double m{0.2};
  double e_tilde{0.5};
  double mu{0.2};

  void validate() const;
};

double gause_response(const GauseParams& p, double y);
Vec2 gause_field(const GauseParams& p, const RegularizationFunction& reg, double x, double y, double eps);
Mat2 gause_jacobian(const GauseParams& p, const RegularizationFunction& reg, double x, double y, double eps);
filippov::PwsSystem gause_pws(const GauseParams& p);

double gause_mu_bf(const GauseParams& p);
double gause_h_star(const GauseParams& p);
// Equilibrium of the upper field.
Vec2 gause_equilibrium(const GauseParams& p);

struct GauseOriginal {
  double x{0.0}, y{0.0}, eps{0.0}, mu{0.0};
};
GauseOriginal gause_desing_transform(const GauseParams& p, int k, double x1, double nu1, double rho1, double mu_hat);

// Hopf value of the regularized model; the scan covers both sides of mu_bf.
bifurcation::HopfLocation gause_hopf(const GauseParams& p, const RegularizationFunction& reg, double eps);

// Section for Gause cycles: x = x_p crossed upward above the equilibrium.
dynamics::Section gause_section(const GauseParams& p);
dynamics::CycleResult gause_cycle(const GauseParams& p, const RegularizationFunction& reg, double eps,
                                  std::optional<Vec2> guess = std::nullopt);

struct MultiStartResult {
  std::vector<Vec2> starts;
  std::vector<std::optional<Vec2>> anchors;
  std::vector<std::string> diagnostics;
  double max_anchor_spread{0.0};
  bool all_converged{false};
};
// Deterministic Halton starts in box.
MultiStartResult gause_multistart(const GauseParams& p, const RegularizationFunction& reg, double eps, int count,
                                  const Box& box);

// True when the orbit from start leaves the ball of radius bound before t_end.
bool gause_escapes(const GauseParams& p, const RegularizationFunction& reg, double eps, Vec2 start,
                   double t_end = 60.0, double bound = 1e4);

struct EquilibriumCheck {
  Vec2 equilibrium;
  EigenPair eigenvalues;
  std::vector<Vec2> starts;
  double final_distance{0.0};
  bool attracting{false};
};
// Smooth equilibrium of the regularized model and convergence of nearby orbits to it.
EquilibriumCheck gause_equilibrium_check(const GauseParams& p, const RegularizationFunction& reg, double eps,
                                         double t_end = 500.0);

struct StickSlipParams {
  double mu_s{1.0};
  double mu_m{0.5};
  double v_m{1.0};
  double alpha{0.5};

  void validate() const;
};

// Cubic Stribeck law and its derivative.
double stribeck(const StickSlipParams& p, double y);
double stribeck_deriv(const StickSlipParams& p, double y);

// Regularized stick-slip model; construction rejects regularizations without odd translated form.
class StickSlipModel {
 public:
  StickSlipModel(StickSlipParams p, RegularizationFunction reg);

  const StickSlipParams& params() const { return p_; }
  const RegularizationFunction& reg() const { return reg_; }

  // Friction mu(y, phi(y/eps)) and its y-derivative.
  double friction(double y, double eps) const;
  double friction_dy(double y, double eps) const;
  Vec2 field(double x, double y, double alpha, double eps) const;
  Mat2 jacobian(double x, double y, double alpha, double eps) const;

 private:
  StickSlipParams p_;
  RegularizationFunction reg_;
};

filippov::PwsSystem stickslip_pws(const StickSlipParams& p);

struct AlphaAh {
  double analytic{0.0};
  double numeric{0.0};
};
AlphaAh stickslip_alpha_ah(const StickSlipModel& model, double eps);
double stickslip_alpha_ah_prefactor(const StickSlipParams& p, const RegularizationFunction& reg);

Vec2 stickslip_desing_field(const StickSlipParams& p, int k, double beta, double x1, double rho1, double alpha_hat);

dynamics::Section stickslip_section(const StickSlipParams& p, double alpha);
dynamics::CycleResult stickslip_cycle(const StickSlipModel& model, double alpha, double eps);

struct CreepReport {
  double eps{0.0};
  double a{0.0};
  std::vector<Vec2> starts;
  // max |x - h(Y)| after the transient, with h(Y) = mu_s(1 - 2 phi(Y)) - eps mu_+'(0) Y.
  double manifold_residual{0.0};
  // Same with the linear term -eps a Y.
  double literal_residual{0.0};
  Vec2 equilibrium;
  double equilibrium_y_over_alpha{0.0};
  // Fast-time span to halve the distance to the equilibrium after the transient (mean over starts).
  double halving_time{0.0};
};
CreepReport creep_study(const StickSlipModel& model, double eps, double a);

}  // namespace regbf::applications
