#pragma once

// Weighted Poisson solves div(rho grad u) = g and the weighted L^2(mu)
// projection of vector fields onto (closures of) gradient fields.
//
// The operator A = -div(rho grad .) built from the odd spectral derivative is
// symmetric positive semidefinite; its kernel (constants and sawtooth modes)
// is projected out of the data, and conjugate gradients run preconditioned by
// the unweighted inverse Laplacian.

#include "wptlab/measure.hpp"

namespace wptlab {

struct PoissonOptions {
  double rel_tol = 1e-12;
  int max_iter = 10000;
  const ScalarField* initial_guess = nullptr;
};

// A gradient field together with the potential that generates it; the
// potential carries the gauge \int p dmu = 0.
struct GradField {
  ScalarField potential;
  VectorField gradient;
};

inline GradField make_grad_field(const Density& mu, const ScalarField& pot) {
  ScalarField p = gauge_zero_mean(pot, mu);
  return GradField{p, grad(p)};
}

namespace elliptic_detail {

inline double dot_plain(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace elliptic_detail

// Solve div(rho grad u) = g with \int u dmu = 0. Requires \int g dvol = 0
// within 1e-8.
inline ScalarField solve_weighted_poisson(const Density& mu, const ScalarField& g,
                                          const PoissonOptions& opt = {}) {
  require_same_grid(mu.kind(), g.kind);
  const ManifoldKind& m = mu.kind();

  double gmean = 0.0;
  for (double v : g.val) gmean += v;
  gmean *= m.cell_volume();
  if (std::abs(gmean) > 1e-8) throw std::invalid_argument("incompatible right-hand side");

  // b = -g restricted to the complement of the kernel modes
  ScalarField b = spectral::remove_kernel_modes(-1.0 * g);

  auto apply_A = [&](const ScalarField& u) {
    return -1.0 * weighted_div(mu, grad(u));
  };

  ScalarField x = opt.initial_guess ? spectral::remove_kernel_modes(*opt.initial_guess)
                                    : ScalarField::zeros(m);
  ScalarField r = b - apply_A(x);
  double bnorm = std::sqrt(elliptic_detail::dot_plain(b.val, b.val));
  if (bnorm == 0.0) return gauge_zero_mean(ScalarField::zeros(m), mu);

  ScalarField z = spectral::inv_neg_laplacian(r);
  ScalarField p = z;
  double rz = elliptic_detail::dot_plain(r.val, z.val);
  double stop = opt.rel_tol * bnorm;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    double rnorm = std::sqrt(elliptic_detail::dot_plain(r.val, r.val));
    if (rnorm <= stop) break;
    ScalarField ap = apply_A(p);
    double alpha = rz / elliptic_detail::dot_plain(p.val, ap.val);
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    z = spectral::inv_neg_laplacian(r);
    double rz_new = elliptic_detail::dot_plain(r.val, z.val);
    double beta = rz_new / rz;
    rz = rz_new;
    ScalarField pn = z;
    axpy(beta, p, pn);
    p = pn;
  }
  if (it == opt.max_iter) {
    double rnorm = std::sqrt(elliptic_detail::dot_plain(r.val, r.val));
    if (rnorm > 1e-10 * std::max(bnorm, 1.0))
      throw std::runtime_error("weighted Poisson solve stagnated");
  }
  return gauge_zero_mean(x, mu);
}

// Orthogonal projection of W onto gradient fields in L^2(TM, dmu):
// G = grad p with div(rho grad p) = div(rho W).
inline GradField project_to_gradients(const Density& mu, const VectorField& w,
                                      const PoissonOptions& opt = {}) {
  require_same_grid(mu.kind(), w.kind);
  ScalarField rhs = weighted_div(mu, w);
  ScalarField p = solve_weighted_poisson(mu, rhs, opt);
  return GradField{p, grad(p)};
}

}  // namespace wptlab
