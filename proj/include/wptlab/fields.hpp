#pragma once

// Grid-sampled scalar, vector and symmetric-tensor fields on the periodic
// charts of S^1 and T^2. Layout is row-major with x as the slow axis:
// idx = ix * n + iy on the torus.

#include <cstddef>
#include <functional>
#include <vector>

#include "wptlab/manifold.hpp"

namespace wptlab {

inline void require_grid(const ManifoldKind& m) {
  if (!m.has_grid()) throw std::invalid_argument("operation requires a grid manifold");
}

inline std::array<double, 2> node_coord(const ManifoldKind& m, long idx) {
  double h = m.spacing();
  if (m.tag == ManifoldTag::circle) return {idx * h, 0.0};
  long n = m.resolution;
  return {(idx / n) * h, (idx % n) * h};
}

struct ScalarField {
  ManifoldKind kind{};
  std::vector<double> val;

  static ScalarField zeros(const ManifoldKind& m) {
    require_grid(m);
    ScalarField f;
    f.kind = m;
    f.val.assign(m.points(), 0.0);
    return f;
  }

  template <typename F>
  static ScalarField sample(const ManifoldKind& m, F&& fn) {
    ScalarField f = zeros(m);
    for (long i = 0; i < m.points(); ++i) {
      auto xy = node_coord(m, i);
      f.val[i] = fn(xy[0], xy[1]);
    }
    return f;
  }

  long size() const { return static_cast<long>(val.size()); }
  double& operator[](long i) { return val[i]; }
  double operator[](long i) const { return val[i]; }
};

struct VectorField {
  ManifoldKind kind{};
  std::array<std::vector<double>, 2> comp;  // comp[1] unused on the circle

  static VectorField zeros(const ManifoldKind& m) {
    require_grid(m);
    VectorField f;
    f.kind = m;
    for (int a = 0; a < m.grid_axes(); ++a) f.comp[a].assign(m.points(), 0.0);
    return f;
  }

  template <typename F>
  static VectorField sample(const ManifoldKind& m, F&& fn) {
    VectorField f = zeros(m);
    for (long i = 0; i < m.points(); ++i) {
      auto xy = node_coord(m, i);
      auto v = fn(xy[0], xy[1]);
      for (int a = 0; a < m.grid_axes(); ++a) f.comp[a][i] = v[a];
    }
    return f;
  }

  long size() const { return static_cast<long>(comp[0].size()); }
};

struct SymTensorField {
  ManifoldKind kind{};
  std::vector<double> xx, xy, yy;  // xy, yy unused on the circle
};

inline void require_same_grid(const ManifoldKind& a, const ManifoldKind& b) {
  if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

inline void check_finite(const ScalarField& f, const char* what) {
  for (double v : f.val)
    if (!std::isfinite(v)) throw std::runtime_error(std::string("non-finite values in ") + what);
}

// --- small field algebra helpers -------------------------------------------

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.kind, b.kind);
  ScalarField r = a;
  for (long i = 0; i < r.size(); ++i) r.val[i] += b.val[i];
  return r;
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.kind, b.kind);
  ScalarField r = a;
  for (long i = 0; i < r.size(); ++i) r.val[i] -= b.val[i];
  return r;
}

inline ScalarField operator*(double s, const ScalarField& a) {
  ScalarField r = a;
  for (double& v : r.val) v *= s;
  return r;
}

inline void axpy(double s, const ScalarField& x, ScalarField& y) {
  require_same_grid(x.kind, y.kind);
  for (long i = 0; i < y.size(); ++i) y.val[i] += s * x.val[i];
}

inline VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_grid(a.kind, b.kind);
  VectorField r = a;
  for (int c = 0; c < r.kind.grid_axes(); ++c)
    for (long i = 0; i < r.size(); ++i) r.comp[c][i] += b.comp[c][i];
  return r;
}

inline VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_grid(a.kind, b.kind);
  VectorField r = a;
  for (int c = 0; c < r.kind.grid_axes(); ++c)
    for (long i = 0; i < r.size(); ++i) r.comp[c][i] -= b.comp[c][i];
  return r;
}

inline VectorField operator*(double s, const VectorField& a) {
  VectorField r = a;
  for (int c = 0; c < r.kind.grid_axes(); ++c)
    for (double& v : r.comp[c]) v *= s;
  return r;
}

inline void axpy(double s, const VectorField& x, VectorField& y) {
  require_same_grid(x.kind, y.kind);
  for (int c = 0; c < y.kind.grid_axes(); ++c)
    for (long i = 0; i < y.size(); ++i) y.comp[c][i] += s * x.comp[c][i];
}

// Pointwise <X, Y>.
inline ScalarField dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a.kind, b.kind);
  ScalarField r = ScalarField::zeros(a.kind);
  for (int c = 0; c < a.kind.grid_axes(); ++c)
    for (long i = 0; i < r.size(); ++i) r.val[i] += a.comp[c][i] * b.comp[c][i];
  return r;
}

// Pointwise H . X  (matrix-vector with the symmetric tensor).
inline VectorField tensor_apply(const SymTensorField& h, const VectorField& x) {
  require_same_grid(h.kind, x.kind);
  VectorField r = VectorField::zeros(x.kind);
  if (x.kind.tag == ManifoldTag::circle) {
    for (long i = 0; i < r.size(); ++i) r.comp[0][i] = h.xx[i] * x.comp[0][i];
  } else {
    for (long i = 0; i < r.size(); ++i) {
      r.comp[0][i] = h.xx[i] * x.comp[0][i] + h.xy[i] * x.comp[1][i];
      r.comp[1][i] = h.xy[i] * x.comp[0][i] + h.yy[i] * x.comp[1][i];
    }
  }
  return r;
}

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.val) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs(const VectorField& f) {
  double m = 0.0;
  for (int c = 0; c < f.kind.grid_axes(); ++c)
    for (double v : f.comp[c]) m = std::max(m, std::abs(v));
  return m;
}

// Pointwise Euclidean norm of the vector, as a field.
inline ScalarField pointwise_norm(const VectorField& f) {
  ScalarField r = dot(f, f);
  for (double& v : r.val) v = std::sqrt(v);
  return r;
}

}  // namespace wptlab
