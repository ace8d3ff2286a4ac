#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "regbf/errors.hpp"
#include "regbf/types.hpp"

namespace regbf::dynamics {

using PlanarField = std::function<Vec2(const Vec2&)>;
using PlanarJacobian = std::function<Mat2(const Vec2&)>;

struct IntegratorConfig {
  double rel_tol{1e-8};
  double abs_tol{1e-10};
  double max_step{std::numeric_limits<double>::infinity()};
  double t_budget{1e3};
  double event_tol{1e-12};
  // Switching-layer width; when positive, steps are capped at layer_eps inside |y| <= 10 layer_eps.
  double layer_eps{0.0};
  double initial_step{0.0};
  // Fixed-step mode for convergence studies; 0 selects adaptive control.
  double fixed_step{0.0};
  std::size_t max_steps{50'000'000};

  void validate() const;
};

enum class SectionKind { Horizontal, Vertical };
enum class Direction { Increasing, Decreasing, Both };

// Horizontal: y = level, hits restricted to x in window. Vertical: x = level, y in window.
struct Section {
  SectionKind kind{SectionKind::Horizontal};
  double level{0.0};
  Direction direction{Direction::Increasing};
  Interval window{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};

  double value(const Vec2& z) const { return kind == SectionKind::Horizontal ? z.y - level : z.x - level; }
  double coordinate(const Vec2& z) const { return kind == SectionKind::Horizontal ? z.x : z.y; }
  Vec2 point(double coord) const {
    return kind == SectionKind::Horizontal ? Vec2{coord, level} : Vec2{level, coord};
  }
  bool in_window(const Vec2& z) const { return window.contains(coordinate(z)); }
};

struct EventHit {
  std::size_t section{0};
  double t{0.0};
  Vec2 z;
  double residual{0.0};
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec2> z;
  std::vector<EventHit> hits;
  bool stopped_on_event{false};
  std::size_t steps_accepted{0};
  std::size_t steps_rejected{0};
  std::size_t evaluations{0};
};

struct IntegrateOptions {
  // Stop after this many window-valid hits (0 = never).
  std::size_t stop_after_hits{0};
  // Keep the step-by-step trajectory; otherwise only the first and last states.
  bool record{true};
  // Insert dense-output samples so consecutive recorded points are at most this far apart (0 = off).
  double sample_spacing{0.0};
};

class BudgetError : public NumericalError {
 public:
  BudgetError(const std::string& what, Trajectory partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

// Dormand-Prince 5(4) with PI step-size control, dense output and event location.
Trajectory integrate(const PlanarField& field, Vec2 z0, Interval t_span, const IntegratorConfig& cfg,
                     std::span<const Section> events = {}, const IntegrateOptions& opts = {});

}  // namespace regbf::dynamics
