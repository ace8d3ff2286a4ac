#include "regbf/types.hpp"

#include "regbf/errors.hpp"

namespace regbf {

EigenPair eigenvalues(const Mat2& m) {
  const double half_tr = 0.5 * m.trace();
  const double disc = half_tr * half_tr - m.det();
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    // Avoid cancellation in the smaller root.
    const double big = half_tr >= 0.0 ? half_tr + s : half_tr - s;
    const double small = big != 0.0 ? m.det() / big : 0.0;
    return big >= small ? EigenPair{big, small} : EigenPair{small, big};
  }
  const double w = std::sqrt(-disc);
  return {{half_tr, w}, {half_tr, -w}};
}

Vec2 solve(const Mat2& m, const Vec2& r) {
  const double d = m.det();
  if (d == 0.0 || !std::isfinite(d)) {
    throw NumericalError("singular 2x2 system");
  }
  return {(m.d * r.x - m.b * r.y) / d, (m.a * r.y - m.c * r.x) / d};
}

}  // namespace regbf
