#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regbf/blowup.hpp"
#include "regbf/dynamics.hpp"
#include "regbf/normalform.hpp"
#include "regbf/regfun.hpp"
#include "regbf/types.hpp"

namespace regbf::bifurcation {

// Fixed constants of the desingularized system.
struct DesingConstants {
  int k{1};
  double beta{1.0};
  double tau{1.0};
  double delta{1.0};

  blowup::DesingParams with(double gamma, double mu_hat) const { return {k, beta, tau, delta, gamma, mu_hat}; }
};

// Closed at gamma = delta/tau, where the curve ends in the BT point.
double hopf_curve_hat(double gamma, const DesingConstants& c);
double sn_curve_hat(double gamma, const DesingConstants& c);
// (mu_hat, gamma).
std::pair<double, double> bt_point_hat(const DesingConstants& c);
double lyapunov_l1(double gamma, const DesingConstants& c);

enum class EquilibriumType { FocusOrNode, Saddle, SaddleNodeDegenerate };
const char* to_string(EquilibriumType t);

struct DesingEquilibrium {
  double x1{0.0};
  double rho1{0.0};
  EquilibriumType type{EquilibriumType::FocusOrNode};
  double trace{0.0};
  double det{0.0};
  bool complex_pair{false};
};

// Positive roots of gamma beta - mu_hat rho^(k^2) + delta rho^(k(1+k)), ascending in rho.
std::vector<DesingEquilibrium> equilibria_desing(const blowup::DesingParams& p);

// The equilibrium p with det J > 0 (largest root), if any.
std::optional<DesingEquilibrium> focus_equilibrium(const blowup::DesingParams& p);

double hopf_numeric(const DesingConstants& c, double gamma);

struct SnNumeric {
  double mu_hat{0.0};
  double rho1{0.0};
  double residual{0.0};
};
SnNumeric sn_numeric(const DesingConstants& c, double gamma);

struct BtNumeric {
  double mu_hat{0.0};
  double gamma{0.0};
  double rho1{0.0};
  // max(|trace|, |det|, |field|) at the located point.
  double residual{0.0};
};
// Solves equilibrium, zero trace and zero determinant simultaneously.
BtNumeric bt_numeric(const DesingConstants& c);
// max(|trace|, |det|, |field|) of the desingularized Jacobian at the analytic BT point.
double bt_residual_at(const DesingConstants& c, double mu_hat, double gamma);

// Cycle around the focus, searched from (-beta + offset, rho_eq) on the section rho1 = rho_eq.
dynamics::CycleResult desing_cycle(const blowup::DesingParams& p, double offset, const dynamics::IntegratorConfig& cfg,
                                   const dynamics::CycleOptions& opts = {});

// Cycle half-width in x1 at mu_hat = mu_ah + span i / samples; fit is amplitude^2 against the offset.
struct AmplitudeLaw {
  double mu_ah{0.0};
  std::vector<double> offsets;
  std::vector<double> amplitudes;
  std::vector<double> floquets;
  LinearFit fit;
};
AmplitudeLaw hopf_amplitude_law(const DesingConstants& c, double gamma, double span = 0.1, int samples = 10);

std::optional<double> homoclinic_locate(const DesingConstants& c, double gamma, double t_max = 1e3);

struct EpsCurves {
  std::optional<double> mu_ah;
  std::optional<double> mu_sn;
  double mu_bt{0.0};
};
EpsCurves eps_scale_curves(double gamma, double eps, const DesingConstants& c);

// Generic Hopf search along a one-parameter family of planar fields.
struct ParamFamily {
  std::function<Vec2(const Vec2&, double)> field;
  std::function<Mat2(const Vec2&, double)> jacobian;
  // Newton residual tolerance at a parameter value.
  std::function<double(double)> residual_tol;
};

struct HopfLocation {
  double param{0.0};
  Vec2 equilibrium;
  EigenPair eigenvalues;
  int grid_index{0};
};

// Marches along grid (seeded at `seed` for grid[0]), finds the first sign change of the trace
// with a complex pair, and bisects to |d param| <= tol.
HopfLocation locate_hopf(const ParamFamily& fam, const std::vector<double>& grid, Vec2 seed, double tol = 1e-12);

// Grid from `from` towards `to` with geometric refinement near `to`.
std::vector<double> clustered_grid(double start, double center, double end, int per_decade = 40,
                                   double min_offset = 1e-9);

HopfLocation hopf_full_numeric(const normalform::NormalFormParams& p, const RegularizationFunction& reg, double eps);

struct BifurcationDiagram {
  DesingConstants constants;
  std::vector<double> gamma_grid;
  std::vector<std::pair<double, double>> ah_curve;
  std::vector<std::pair<double, double>> sn_curve;
  std::pair<double, double> bt_point;  // (mu_hat, gamma)
  std::vector<std::pair<double, double>> hom_samples;
};

BifurcationDiagram build_diagram(const DesingConstants& c, const std::vector<double>& gamma_grid,
                                 bool with_homoclinic);

}  // namespace regbf::bifurcation
