#pragma once

// Off-grid evaluation of periodic fields, and displacement maps
// F_s(x) = x + s d(x) on the flat charts (d = grad(phi) for geodesic legs,
// but any periodic displacement is accepted).
//
// Evaluation is two-stage: a spectral refinement of the grid (exact for
// resolved modes) followed by periodic 8-point Lagrange interpolation on the
// fine grid. The refinement keeps the local stencil error far below the
// quadrature tolerances used elsewhere.

#include "wptlab/calculus.hpp"

namespace wptlab {

namespace interp_detail {

inline constexpr int kStencil = 8;  // Lagrange points per axis
inline constexpr int kLeft = 3;     // stencil offsets -3..4

inline const std::array<double, kStencil>& denominators() {
  static const std::array<double, kStencil> d = [] {
    std::array<double, kStencil> r{};
    for (int j = 0; j < kStencil; ++j) {
      double p = 1.0;
      for (int l = 0; l < kStencil; ++l)
        if (l != j) p *= double(j - l);
      r[j] = p;
    }
    return r;
  }();
  return d;
}

inline void weights(double frac, std::array<double, kStencil>& w) {
  const auto& den = denominators();
  for (int j = 0; j < kStencil; ++j) {
    double num = 1.0;
    for (int l = 0; l < kStencil; ++l)
      if (l != j) num *= frac - double(l - kLeft);
    w[j] = num / den[j];
  }
}

}  // namespace interp_detail

class Interpolant {
 public:
  Interpolant() = default;

  explicit Interpolant(const ScalarField& f, int refine = 4) : kind_(f.kind) {
    fine_n_ = f.kind.resolution * refine;
    inv_hf_ = fine_n_ / kTwoPi;
    fine_ = spectral::upsample(f, refine);
  }

  bool valid() const { return fine_n_ > 0; }

  double operator()(const std::array<double, 2>& x) const {
    using namespace interp_detail;
    std::array<double, kStencil> wx;
    int bx = base(x[0], wx);
    if (kind_.tag == ManifoldTag::circle) {
      double s = 0.0;
      for (int j = 0; j < kStencil; ++j) s += wx[j] * fine_[wrap_idx(bx + j - kLeft)];
      return s;
    }
    std::array<double, kStencil> wy;
    int by = base(x[1], wy);
    double s = 0.0;
    for (int j = 0; j < kStencil; ++j) {
      long row = static_cast<long>(wrap_idx(bx + j - kLeft)) * fine_n_;
      double sy = 0.0;
      for (int l = 0; l < kStencil; ++l) sy += wy[l] * fine_[row + wrap_idx(by + l - kLeft)];
      s += wx[j] * sy;
    }
    return s;
  }

 private:
  int base(double coord, std::array<double, interp_detail::kStencil>& w) const {
    double s = wrap_angle(coord) * inv_hf_;
    double fl = std::floor(s);
    interp_detail::weights(s - fl, w);
    return static_cast<int>(fl);
  }

  int wrap_idx(int i) const {
    int r = i % fine_n_;
    return r < 0 ? r + fine_n_ : r;
  }

  ManifoldKind kind_{};
  int fine_n_ = 0;
  double inv_hf_ = 0.0;
  std::vector<double> fine_;
};

struct Mat2 {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
  double det() const { return a11 * a22 - a12 * a21; }
};

// The family F_s(x) = x + s d(x) of periodic displacement maps; one instance
// serves every scale s. The Jacobian is I + s grad(d).
class GridFlow {
 public:
  GridFlow() = default;

  explicit GridFlow(const VectorField& displacement, int refine = 4)
      : kind_(displacement.kind), disp_(displacement) {
    zero_ = max_abs(disp_) == 0.0;
    if (zero_) return;
    int axes = kind_.grid_axes();
    for (int c = 0; c < axes; ++c) {
      ScalarField dc{kind_, disp_.comp[c]};
      di_[c] = Interpolant(dc, refine);
      for (int a = 0; a < axes; ++a) {
        jac_[c][a] = spectral::deriv(dc, a).val;
        ji_[c][a] = Interpolant(ScalarField{kind_, jac_[c][a]}, refine);
      }
    }
  }

  static GridFlow from_potential(const ScalarField& potential, int refine = 4) {
    return GridFlow(grad(potential), refine);
  }

  const ManifoldKind& kind() const { return kind_; }
  bool is_zero() const { return zero_; }
  const VectorField& displacement() const { return disp_; }

  std::array<double, 2> apply(double s, const std::array<double, 2>& x) const {
    if (zero_ || s == 0.0) return {wrap_angle(x[0]), wrap_angle(x[1])};
    std::array<double, 2> y{x[0] + s * di_[0](x), 0.0};
    if (kind_.grid_axes() == 2) y[1] = x[1] + s * di_[1](x);
    return {wrap_angle(y[0]), wrap_angle(y[1])};
  }

  Mat2 jacobian(double s, const std::array<double, 2>& x) const {
    Mat2 j;
    if (zero_ || s == 0.0) return j;
    j.a11 = 1.0 + s * ji_[0][0](x);
    if (kind_.grid_axes() == 2) {
      j.a12 = s * ji_[0][1](x);
      j.a21 = s * ji_[1][0](x);
      j.a22 = 1.0 + s * ji_[1][1](x);
    }
    return j;
  }

  double det_at(double s, const std::array<double, 2>& x) const {
    return kind_.grid_axes() == 1 ? jacobian(s, x).a11 : jacobian(s, x).det();
  }

  // min over grid nodes of det(I + s grad d), from the exact grid values
  double min_nodal_det(double s) const {
    if (zero_ || s == 0.0) return 1.0;
    double mind = std::numeric_limits<double>::max();
    for (long i = 0; i < kind_.points(); ++i) {
      double d;
      if (kind_.grid_axes() == 1) {
        d = 1.0 + s * jac_[0][0][i];
      } else {
        double a = 1.0 + s * jac_[0][0][i], b = s * jac_[0][1][i];
        double c = s * jac_[1][0][i], e = 1.0 + s * jac_[1][1][i];
        d = a * e - b * c;
      }
      mind = std::min(mind, d);
    }
    return mind;
  }

  // Solve F_s(x) = y by damped Newton from x = y. Legs and geodesic samples
  // keep |s d| small, so this converges in a handful of steps.
  std::array<double, 2> invert(double s, const std::array<double, 2>& y) const {
    if (zero_ || s == 0.0) return {wrap_angle(y[0]), wrap_angle(y[1])};
    std::array<double, 2> x{wrap_angle(y[0]), wrap_angle(y[1])};
    int axes = kind_.grid_axes();
    auto residual = [&](const std::array<double, 2>& p, std::array<double, 2>& g) {
      auto fp = apply(s, p);
      g[0] = wrap_diff(fp[0] - y[0]);
      g[1] = axes == 2 ? wrap_diff(fp[1] - y[1]) : 0.0;
      return std::max(std::abs(g[0]), std::abs(g[1]));
    };
    std::array<double, 2> g{};
    double r = residual(x, g);
    for (int it = 0; it < 50; ++it) {
      if (r <= 1e-12) return x;
      Mat2 j = jacobian(s, x);
      std::array<double, 2> dx{};
      if (axes == 1) {
        dx[0] = -g[0] / j.a11;
      } else {
        double det = j.det();
        dx[0] = -(j.a22 * g[0] - j.a12 * g[1]) / det;
        dx[1] = -(-j.a21 * g[0] + j.a11 * g[1]) / det;
      }
      double lambda = 1.0;
      for (;;) {
        std::array<double, 2> xn{wrap_angle(x[0] + lambda * dx[0]),
                                 wrap_angle(x[1] + lambda * dx[1])};
        std::array<double, 2> gn{};
        double rn = residual(xn, gn);
        if (rn <= (1.0 - 0.25 * lambda) * r || lambda <= 1.0 / 64.0) {
          x = xn;
          g = gn;
          r = rn;
          break;
        }
        lambda *= 0.5;
      }
    }
    if (r <= 1e-10) return x;  // wedged against rounding
    throw std::runtime_error("inverse map Newton iteration failed to converge");
  }

 private:
  ManifoldKind kind_{};
  bool zero_ = true;
  VectorField disp_;
  std::array<std::vector<double>, 2> jac_[2];  // jac_[c][a] = d(d_c)/d(x_a) grid values
  Interpolant di_[2];
  Interpolant ji_[2][2];
};

}  // namespace wptlab
