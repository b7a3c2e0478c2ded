#pragma once

// Geometry kernels for the three model manifolds: the circle S^1 and the
// flat torus T^2 (global periodic angle charts, used with grids) and the
// round sphere S^2 (embedded in R^3, used pointwise only).

#include <array>
#include <cmath>
#include <stdexcept>

namespace wptlab {

inline constexpr double kTwoPi = 6.28318530717958647692528676656;
inline constexpr double kPi = 3.14159265358979323846264338328;

enum class ManifoldTag { circle, torus2, sphere2 };

struct ManifoldKind {
  ManifoldTag tag = ManifoldTag::circle;
  int resolution = 0;  // grid nodes per axis; 0 for the sphere

  static ManifoldKind circle(int n) { return validated({ManifoldTag::circle, n}); }
  static ManifoldKind torus2(int n) { return validated({ManifoldTag::torus2, n}); }
  static ManifoldKind sphere2() { return {ManifoldTag::sphere2, 0}; }

  bool has_grid() const { return tag != ManifoldTag::sphere2; }
  int dim() const { return tag == ManifoldTag::circle ? 1 : 2; }
  int grid_axes() const { return tag == ManifoldTag::circle ? 1 : 2; }
  long points() const {
    return tag == ManifoldTag::circle ? resolution : long(resolution) * resolution;
  }
  double spacing() const { return kTwoPi / resolution; }
  double cell_volume() const {
    double h = spacing();
    return tag == ManifoldTag::circle ? h : h * h;
  }

  friend bool operator==(const ManifoldKind& a, const ManifoldKind& b) {
    return a.tag == b.tag && a.resolution == b.resolution;
  }

 private:
  static ManifoldKind validated(ManifoldKind m) {
    if (m.resolution < 16 || m.resolution % 2 != 0)
      throw std::invalid_argument("grid resolution must be >= 16 and even");
    return m;
  }
};

// Chart coordinates: angle(s) for circle/torus, a unit 3-vector for the
// sphere. Unused slots stay zero.
struct Point {
  std::array<double, 3> c{0.0, 0.0, 0.0};
};

// Tangent components in the same chart; orthogonal to the base point on the
// sphere.
struct TangentVector {
  std::array<double, 3> c{0.0, 0.0, 0.0};
};

inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

// Difference wrapped into (-pi, pi].
inline double wrap_diff(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r > kPi) r -= kTwoPi;
  if (r <= -kPi) r += kTwoPi;
  return r;
}

namespace detail {

inline double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

inline std::array<double, 3> combine3(double s, const std::array<double, 3>& a,
                                      double t, const std::array<double, 3>& b) {
  return {s * a[0] + t * b[0], s * a[1] + t * b[1], s * a[2] + t * b[2]};
}

inline void check_sphere_point(const Point& x) {
  if (std::abs(norm3(x.c) - 1.0) > 1e-12)
    throw std::invalid_argument("sphere point must be unit norm within 1e-12");
}

inline void check_sphere_tangent(const Point& x, const TangentVector& v) {
  if (std::abs(dot3(x.c, v.c)) > 1e-12)
    throw std::invalid_argument("sphere tangent must be orthogonal to base within 1e-12");
}

}  // namespace detail

inline Point make_point(const ManifoldKind& m, std::array<double, 3> c) {
  switch (m.tag) {
    case ManifoldTag::circle:
      return {{wrap_angle(c[0]), 0.0, 0.0}};
    case ManifoldTag::torus2:
      return {{wrap_angle(c[0]), wrap_angle(c[1]), 0.0}};
    case ManifoldTag::sphere2: {
      Point p{c};
      detail::check_sphere_point(p);
      return p;
    }
  }
  throw std::logic_error("unreachable");
}

inline double tangent_norm(const ManifoldKind& m, const TangentVector& v) {
  switch (m.tag) {
    case ManifoldTag::circle:
      return std::abs(v.c[0]);
    case ManifoldTag::torus2:
      return std::hypot(v.c[0], v.c[1]);
    case ManifoldTag::sphere2:
      return detail::norm3(v.c);
  }
  throw std::logic_error("unreachable");
}

// Geodesic endpoint exp_x(v); |v| is the geodesic length.
inline Point exp_map(const ManifoldKind& m, const Point& x, const TangentVector& v) {
  switch (m.tag) {
    case ManifoldTag::circle:
      return {{wrap_angle(x.c[0] + v.c[0]), 0.0, 0.0}};
    case ManifoldTag::torus2:
      return {{wrap_angle(x.c[0] + v.c[0]), wrap_angle(x.c[1] + v.c[1]), 0.0}};
    case ManifoldTag::sphere2: {
      detail::check_sphere_point(x);
      detail::check_sphere_tangent(x, v);
      double theta = detail::norm3(v.c);
      if (theta < 1e-300) return x;
      std::array<double, 3> dir = {v.c[0] / theta, v.c[1] / theta, v.c[2] / theta};
      auto p = detail::combine3(std::cos(theta), x.c, std::sin(theta), dir);
      double n = detail::norm3(p);
      return {{p[0] / n, p[1] / n, p[2] / n}};
    }
  }
  throw std::logic_error("unreachable");
}

// Inverse of exp_map; on the sphere requires y away from the antipode of x.
inline TangentVector log_map(const ManifoldKind& m, const Point& x, const Point& y) {
  switch (m.tag) {
    case ManifoldTag::circle:
      return {{wrap_diff(y.c[0] - x.c[0]), 0.0, 0.0}};
    case ManifoldTag::torus2:
      return {{wrap_diff(y.c[0] - x.c[0]), wrap_diff(y.c[1] - x.c[1]), 0.0}};
    case ManifoldTag::sphere2: {
      detail::check_sphere_point(x);
      detail::check_sphere_point(y);
      double c = detail::dot3(x.c, y.c);
      c = std::clamp(c, -1.0, 1.0);
      auto perp = detail::combine3(1.0, y.c, -c, x.c);
      double pn = detail::norm3(perp);
      if (pn < 1e-14) {
        if (c > 0.0) return {};  // y == x
        throw std::domain_error("log_map undefined at the antipode");
      }
      double theta = std::acos(c);
      return {{theta * perp[0] / pn, theta * perp[1] / pn, theta * perp[2] / pn}};
    }
  }
  throw std::logic_error("unreachable");
}

// Parallel transport of w along t -> exp_x(t v) from t=0 to t=1.
inline TangentVector geodesic_transport(const ManifoldKind& m, const Point& x,
                                        const TangentVector& v, const TangentVector& w) {
  if (m.tag != ManifoldTag::sphere2) return w;
  detail::check_sphere_point(x);
  detail::check_sphere_tangent(x, v);
  detail::check_sphere_tangent(x, w);
  double theta = detail::norm3(v.c);
  if (theta < 1e-300) return w;
  std::array<double, 3> dir = {v.c[0] / theta, v.c[1] / theta, v.c[2] / theta};
  double a = detail::dot3(w.c, dir);
  auto perp = detail::combine3(1.0, w.c, -a, dir);
  // dir transports to -sin(theta) x + cos(theta) dir; the binormal part is fixed.
  auto tdir = detail::combine3(-std::sin(theta), x.c, std::cos(theta), dir);
  return {detail::combine3(a, tdir, 1.0, perp)};
}

// Derivative of the exponential map: d exp_x|_v (w), a tangent vector at
// exp_x(v). Closed-form Jacobi decomposition on the sphere: the radial part
// transports unchanged, the orthogonal part picks up sin(theta)/theta.
inline TangentVector dexp(const ManifoldKind& m, const Point& x, const TangentVector& v,
                          const TangentVector& w) {
  if (m.tag != ManifoldTag::sphere2) return w;
  detail::check_sphere_point(x);
  detail::check_sphere_tangent(x, v);
  detail::check_sphere_tangent(x, w);
  double theta = detail::norm3(v.c);
  if (theta < 1e-300) return w;
  std::array<double, 3> dir = {v.c[0] / theta, v.c[1] / theta, v.c[2] / theta};
  double a = detail::dot3(w.c, dir);
  auto perp = detail::combine3(1.0, w.c, -a, dir);
  double s = std::sin(theta) / theta;
  auto tdir = detail::combine3(-std::sin(theta), x.c, std::cos(theta), dir);
  return {detail::combine3(a, tdir, s, perp)};
}

// Inverse of dexp: given z at exp_x(v), the unique w at x with
// d exp_x|_v (w) = z. Fails at and beyond the conjugate radius.
inline TangentVector dexp_inverse(const ManifoldKind& m, const Point& x,
                                  const TangentVector& v, const TangentVector& z) {
  if (m.tag != ManifoldTag::sphere2) return z;
  double theta = detail::norm3(v.c);
  if (theta >= kPi) throw std::domain_error("leg length >= conjugate radius");
  if (theta < 1e-300) return z;
  Point y = exp_map(m, x, v);
  TangentVector v_end = geodesic_transport(m, x, v, v);
  TangentVector back{{-v_end.c[0], -v_end.c[1], -v_end.c[2]}};
  TangentVector zt = geodesic_transport(m, y, back, z);
  std::array<double, 3> dir = {v.c[0] / theta, v.c[1] / theta, v.c[2] / theta};
  double a = detail::dot3(zt.c, dir);
  auto perp = detail::combine3(1.0, zt.c, -a, dir);
  double s = theta / std::sin(theta);
  return {detail::combine3(a, dir, s, perp)};
}

}  // namespace wptlab
