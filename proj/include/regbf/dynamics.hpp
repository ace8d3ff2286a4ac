#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regbf/normalform.hpp"
#include "regbf/numerics.hpp"
#include "regbf/ode.hpp"
#include "regbf/regfun.hpp"

namespace regbf::dynamics {

struct Equilibrium {
  Vec2 point;
  EigenPair eigenvalues;
  double residual{0.0};
};

std::optional<Equilibrium> find_equilibrium(const PlanarField& field, const PlanarJacobian& jacobian, Vec2 guess,
                                            double tol = 1e-12);

struct ReturnPoint {
  Vec2 point;
  double time{0.0};
};

// First return to the section from a point on it.
ReturnPoint poincare_return(const PlanarField& field, const Section& sec, Vec2 start, const IntegratorConfig& cfg);

struct LimitCycle {
  Polyline points;
  double period{0.0};
  double mu{0.0};
  double eps{0.0};
  double floquet{0.0};
  Vec2 anchor;
  bool stable{false};
  double closure_gap{0.0};
  double fixed_point_residual{0.0};
  int iterations{0};
  double amplitude() const;  // max y on the cycle
  double diameter() const;   // bounding-box diagonal
};

struct CycleOptions {
  double fixed_point_tol{1e-10};
  int max_iterations{200};
  double min_amplitude{1e-6};
  double sample_spacing{1e-3};
  double fd_rel_step{1e-6};
};

struct CycleResult {
  std::optional<LimitCycle> cycle;
  std::string diagnostic;
  int returns{0};
};

// Fixed point of the return map; the guess is moved onto the section first if needed.
CycleResult find_limit_cycle(const PlanarField& field, const Section& sec, Vec2 guess, const IntegratorConfig& cfg,
                             const CycleOptions& opts = {});

// Inserts points so that no segment is longer than spacing.
Polyline resample(const Polyline& line, double spacing);

// Symmetric Hausdorff distance using point-to-segment distances after resampling.
double hausdorff(const Polyline& a, const Polyline& b, double spacing = 1e-3);
double directed_hausdorff(const Polyline& a, const Polyline& b);

// Integrator settings for cycles of the regularized field at switching-layer width eps.
IntegratorConfig cycle_config(double eps);

// Section through the smooth equilibrium for cycles of the normal form.
Section normalform_section(const Vec2& equilibrium);

// Cycle of the regularized normal form around the smooth equilibrium continued from the upper focus.
CycleResult regularized_cycle(const normalform::NormalFormParams& p, const RegularizationFunction& reg, double mu,
                              double eps);

struct ConvergenceRow {
  double eps{0.0};
  double hausdorff{0.0};
  double period{0.0};
  double floquet{0.0};
  bool found{false};
  std::string diagnostic;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  LinearFit fit;
  bool partial{false};
  bool monotone{false};
  double expected_slope{0.0};
  filippov::PwsCycle pws_cycle;
};

ConvergenceStudy relax_convergence_study(const normalform::NormalFormParams& p, const RegularizationFunction& reg,
                                         double mu, const std::vector<double>& eps_ladder);

enum class Termination { WindowEdge, DetectionFailure, PeriodBlowup };
const char* to_string(Termination t);

struct BranchSample {
  double mu{0.0};
  LimitCycle cycle;
  double amplitude{0.0};
};

struct CycleBranch {
  std::vector<BranchSample> samples;  // mu increasing
  double eps{0.0};
  Termination terminated_by{Termination::WindowEdge};
  std::string diagnostic;
  double last_failed_mu{0.0};
};

CycleBranch continue_cycle_in_mu(const normalform::NormalFormParams& p, const RegularizationFunction& reg,
                                 double eps, Interval mu_window, int steps, double period_limit = 1e3);

struct EquilibriumSample {
  double mu{0.0};
  Vec2 point;
  EigenPair eigenvalues;
};

struct EquilibriumBranch {
  std::string label;
  std::vector<EquilibriumSample> samples;  // in marching order (mu decreasing)
  bool complete{true};
};

std::vector<EquilibriumBranch> continue_equilibrium_in_mu(const normalform::NormalFormParams& p,
                                                          const RegularizationFunction& reg, double eps,
                                                          Interval mu_window, int steps);

}  // namespace regbf::dynamics
