#pragma once

// Discrete differential operators on periodic grids: gradient, Hessian and
// divergence at spectral accuracy.

#include "wptlab/spectral.hpp"

namespace wptlab {

inline VectorField grad(const ScalarField& f) {
  VectorField g = VectorField::zeros(f.kind);
  g.comp[0] = spectral::deriv(f, 0).val;
  if (f.kind.grid_axes() == 2) g.comp[1] = spectral::deriv(f, 1).val;
  return g;
}

// Coordinate Hessian; the Levi-Civita connection is trivial in the flat
// charts of S^1 and T^2.
inline SymTensorField hess(const ScalarField& f) {
  SymTensorField h;
  h.kind = f.kind;
  h.xx = spectral::deriv2(f, 0, 0).val;
  if (f.kind.grid_axes() == 2) {
    h.xy = spectral::deriv2(f, 0, 1).val;
    h.yy = spectral::deriv2(f, 1, 1).val;
  }
  return h;
}

inline ScalarField divergence(const VectorField& x) {
  ScalarField fx{x.kind, x.comp[0]};
  ScalarField d = spectral::deriv(fx, 0);
  if (x.kind.grid_axes() == 2) {
    ScalarField fy{x.kind, x.comp[1]};
    d = d + spectral::deriv(fy, 1);
  }
  return d;
}

// Hess_f(X, Y) pointwise.
inline ScalarField hess_bilinear(const SymTensorField& h, const VectorField& x,
                                 const VectorField& y) {
  return dot(tensor_apply(h, x), y);
}

}  // namespace wptlab
