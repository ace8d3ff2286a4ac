#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "regbf/types.hpp"

namespace regbf::filippov {

struct PlanarVectorField {
  std::function<Vec2(const Vec2&, double)> value;
  // Optional; central differences are used when empty.
  std::function<Mat2(const Vec2&, double)> jacobian;

  Vec2 operator()(const Vec2& z, double alpha) const { return value(z, alpha); }
  Mat2 jacobian_at(const Vec2& z, double alpha) const;
  // Derivative with respect to the parameter, by central differences.
  Vec2 parameter_derivative(const Vec2& z, double alpha) const;
};

// Pair of fields on either side of the switching line y = 0.
struct PwsSystem {
  std::string name;
  PlanarVectorField zplus;
  PlanarVectorField zminus;
  Box domain;

  void validate() const;
};

enum class PointType { Crossing, Sliding, Tangency };
enum class Visibility { Visible, Invisible, Degenerate };
enum class Side { Plus, Minus };
enum class Stability { Stable, Unstable, Neutral };

const char* to_string(PointType t);
const char* to_string(Visibility v);
const char* to_string(Side s);
const char* to_string(Stability s);

struct FoldPoint {
  double x{0.0};
  Visibility visibility{Visibility::Degenerate};
  Side side{Side::Plus};
  // Z(Zf) at the fold for the tangent field.
  double second_lie{0.0};
};

enum class BfType { BF1, BF2, BF3, BF4, BF5, Degenerate };
const char* to_string(BfType t);

struct BfCandidate {
  Vec2 z_bf;
  double alpha_bf{0.0};
  std::complex<double> eigenvalue;  // A + iB of the Z+ Jacobian
  double A{0.0};
  double B{0.0};
  double lower_normal{0.0};           // Z2-(z_bf)
  double determinant_condition{0.0};  // det(d_alpha Z+ | d_x Z+)
  double sliding_derivative{0.0};     // gamma analogue
  std::vector<std::string> degenerate_conditions;

  bool degenerate() const { return !degenerate_conditions.empty(); }
};

struct BfClassification {
  BfType type{BfType::Degenerate};
  double probe_alpha{0.0};
  std::optional<double> x_fold;
  std::optional<double> x_drop;
  std::optional<double> x_sliding_eq;
  bool hbf_degenerate{false};
  std::string note;
};

struct SlidingEquilibrium {
  double x{0.0};
  Stability stability{Stability::Neutral};
  double derivative{0.0};
  // False for a virtual root of the sliding formula outside the sliding region.
  bool admissible{true};
};

// Lie derivatives of f(x, y) = y.
double lie_plus(const PwsSystem& sys, double x, double alpha);
double lie_minus(const PwsSystem& sys, double x, double alpha);

PointType classify_point(const PwsSystem& sys, double x, double alpha);

// Filippov sliding vector field on y = 0.
double sliding_field(const PwsSystem& sys, double x, double alpha);
// Convex-combination weight chi with chi Z+ + (1 - chi) Z- tangent to y = 0.
double sliding_weight(const PwsSystem& sys, double x, double alpha);

std::vector<FoldPoint> find_folds(const PwsSystem& sys, Interval x_interval, double alpha, int samples = 4001);

std::optional<BfCandidate> detect_bf(const PwsSystem& sys, Interval alpha_interval);

BfClassification classify_bf(const PwsSystem& sys, const BfCandidate& bf, double probe);

std::vector<SlidingEquilibrium> sliding_equilibria(const PwsSystem& sys, double alpha, Interval x_interval,
                                                   int samples = 4001, bool include_virtual = false);

struct PwsCycle {
  Polyline points;
  double x_fold{0.0};
  double x_drop{0.0};
  double flight_time{0.0};
  double sliding_time{0.0};
};

// Grazing Z+ orbit from a visible plus-side fold to its first return to y = 0.
struct DropResult {
  double x_drop{0.0};
  double flight_time{0.0};
  Polyline arc;
};
DropResult drop_point(const PwsSystem& sys, double alpha, double x_fold, double spacing = 1e-3,
                      double t_budget = 1e3);

// PWS cycle: grazing arc from the fold plus the sliding segment back to it.
PwsCycle construct_pws_cycle(const PwsSystem& sys, double alpha, const FoldPoint& fold, double spacing = 1e-3,
                             double t_budget = 1e3);

}  // namespace regbf::filippov
