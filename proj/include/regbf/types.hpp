#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace regbf {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

// Row-major [[a, b], [c, d]].
struct Mat2 {
  double a{0.0}, b{0.0}, c{0.0}, d{0.0};

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }
  Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
};

struct EigenPair {
  std::complex<double> first;
  std::complex<double> second;

  bool complex_pair() const { return first.imag() != 0.0; }
  double max_real() const { return std::max(first.real(), second.real()); }
};

// Closed-form eigenvalues; a complex pair is returned with first.imag() > 0.
EigenPair eigenvalues(const Mat2& m);

// Solves m * z = r; throws NumericalError when singular.
Vec2 solve(const Mat2& m, const Vec2& r);

struct Interval {
  double lo{0.0};
  double hi{0.0};

  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

struct Box {
  double x_min{-1.0}, x_max{1.0}, y_min{-1.0}, y_max{1.0};

  bool contains(const Vec2& z) const {
    return z.x >= x_min && z.x <= x_max && z.y >= y_min && z.y <= y_max;
  }
};

using Polyline = std::vector<Vec2>;

}  // namespace regbf
