#pragma once

// Probability measures: positive grid densities with uniform quadrature
// weights, atomic measures on tangent spaces, the Otto inner product, and
// density pushforward under displacement maps.

#include "wptlab/interp.hpp"

namespace wptlab {

inline constexpr double kDensityFloor = 1e-8;
inline constexpr double kMassTolerance = 1e-10;

class Density {
 public:
  Density(const ManifoldKind& m, std::vector<double> values) : kind_(m), rho_(std::move(values)) {
    require_grid(m);
    if (static_cast<long>(rho_.size()) != m.points())
      throw std::invalid_argument("density size does not match grid");
    double w = m.cell_volume();
    double mass = 0.0;
    for (double r : rho_) {
      if (!std::isfinite(r)) throw std::invalid_argument("density has non-finite values");
      if (r < kDensityFloor)
        throw std::invalid_argument("density below the positivity floor 1e-8");
      mass += r;
    }
    mass *= w;
    if (std::abs(mass - 1.0) > kMassTolerance)
      throw std::invalid_argument("density mass deviates from 1 beyond 1e-10");
  }

  // Scale a positive field by its total mass to obtain a probability density.
  static Density normalized(const ScalarField& f) {
    double mass = 0.0;
    for (double v : f.val) mass += v;
    mass *= f.kind.cell_volume();
    std::vector<double> vals = f.val;
    for (double& v : vals) v /= mass;
    return Density(f.kind, std::move(vals));
  }

  const ManifoldKind& kind() const { return kind_; }
  const std::vector<double>& values() const { return rho_; }
  double operator[](long i) const { return rho_[i]; }
  double cell_volume() const { return kind_.cell_volume(); }
  long size() const { return static_cast<long>(rho_.size()); }
  ScalarField as_field() const { return ScalarField{kind_, rho_}; }

 private:
  ManifoldKind kind_;
  std::vector<double> rho_;
};

inline double integrate(const ScalarField& f, const Density& mu) {
  require_same_grid(f.kind, mu.kind());
  double s = 0.0;
  for (long i = 0; i < f.size(); ++i) s += f.val[i] * mu[i];
  return s * mu.cell_volume();
}

// Otto metric: <V_X, V_Y> at mu.
inline double otto_inner(const Density& mu, const VectorField& x, const VectorField& y) {
  require_same_grid(mu.kind(), x.kind);
  require_same_grid(x.kind, y.kind);
  double s = 0.0;
  for (int c = 0; c < x.kind.grid_axes(); ++c)
    for (long i = 0; i < x.size(); ++i) s += x.comp[c][i] * y.comp[c][i] * mu[i];
  return s * mu.cell_volume();
}

inline double otto_norm(const Density& mu, const VectorField& x) {
  return std::sqrt(std::max(0.0, otto_inner(mu, x, x)));
}

// div(rho X) at spectral accuracy.
inline ScalarField weighted_div(const Density& mu, const VectorField& x) {
  require_same_grid(mu.kind(), x.kind);
  VectorField rx = x;
  for (int c = 0; c < x.kind.grid_axes(); ++c)
    for (long i = 0; i < x.size(); ++i) rx.comp[c][i] *= mu[i];
  return divergence(rx);
}

// Shift f by a constant so that its mu-average vanishes.
inline ScalarField gauge_zero_mean(const ScalarField& f, const Density& mu) {
  double m = integrate(f, mu);
  ScalarField r = f;
  for (double& v : r.val) v -= m;
  return r;
}

struct AtomicMeasure {
  std::vector<std::array<double, 3>> atoms;  // tangent vectors in one fibre
  std::vector<double> weights;

  AtomicMeasure(std::vector<std::array<double, 3>> a, std::vector<double> w)
      : atoms(std::move(a)), weights(std::move(w)) {
    if (atoms.size() != weights.size())
      throw std::invalid_argument("atom/weight count mismatch");
    double s = 0.0;
    for (double wk : weights) {
      if (wk < 0.0) throw std::invalid_argument("atomic measure weights must be nonnegative");
      s += wk;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("atomic measure weights must sum to 1 within 1e-12");
  }

  size_t size() const { return atoms.size(); }
};

struct PushforwardResult {
  Density density;
  std::vector<std::array<double, 2>> preimage;  // F^{-1}(grid node)
};

// (F_s)_* mu0 for the displacement map of `flow`; the density at a node y is
// rho0(x)/det dF_s(x) at x = F_s^{-1}(y).
inline PushforwardResult pushforward_with_preimage(const Density& mu0, const GridFlow& flow,
                                                   double s,
                                                   const Interpolant* rho0_interp = nullptr) {
  const ManifoldKind& m = mu0.kind();
  require_same_grid(m, flow.kind());
  long np = m.points();
  std::vector<std::array<double, 2>> pre(np);
  if (flow.is_zero() || s == 0.0) {
    for (long i = 0; i < np; ++i) pre[i] = node_coord(m, i);
    return {mu0, std::move(pre)};
  }
  if (flow.min_nodal_det(s) < 1e-6)
    throw std::domain_error("map not diffeomorphic at this resolution");
  Interpolant local;
  if (!rho0_interp) {
    local = Interpolant(mu0.as_field());
    rho0_interp = &local;
  }
  std::vector<double> vals(np);
  for (long i = 0; i < np; ++i) {
    auto y = node_coord(m, i);
    auto x = flow.invert(s, y);
    pre[i] = x;
    vals[i] = (*rho0_interp)(x) / flow.det_at(s, x);
  }
  return {Density(m, std::move(vals)), std::move(pre)};
}

inline Density pushforward_density(const Density& mu0, const GridFlow& flow, double s,
                                   const Interpolant* rho0_interp = nullptr) {
  return pushforward_with_preimage(mu0, flow, s, rho0_interp).density;
}

}  // namespace wptlab
