#pragma once

// Displacement geodesics of absolutely continuous measures, generated from an
// initial density and a velocity potential: mu_t = (F_t)_* mu0 with
// F_t(x) = exp_x(t grad phi0). Potentials along the path are recovered from
// the continuity equation.
//
// Paths are generated on the extended interval [-delta, 1+delta] with
// delta = 0.1; the extension realizes the interior-of-a-minimizing-geodesic
// hypothesis and gives the time stencils room at t = 0 and t = 1.

#include "wptlab/elliptic.hpp"

namespace wptlab {

inline constexpr double kPathExtension = 0.1;
inline constexpr double kInteriorJacobianMargin = 0.05;

class GeodesicPath {
 public:
  ManifoldKind kind{};
  int samples = 0;  // steps over [0,1]; sample times are (j - pad)/samples
  int pad = 0;      // extension samples on each side
  std::vector<Density> densities;     // raw index 0 .. samples + 2*pad
  std::vector<ScalarField> potentials;
  ScalarField generator;              // phi0
  GridFlow flow;                      // displacement grad(phi0)
  double continuity_residual = 0.0;   // sup-norm over nominal samples
  double min_jacobian = 0.0;          // over the extended interval

  int raw_count() const { return samples + 2 * pad + 1; }
  int raw_of_nominal(int j) const { return j + pad; }
  double time_of_raw(int raw) const { return double(raw - pad) / samples; }
  double dt() const { return 1.0 / samples; }

  const Density& mu(int j) const { return densities[raw_of_nominal(j)]; }
  const ScalarField& phi(int j) const { return potentials[raw_of_nominal(j)]; }
  const Density& mu_raw(int raw) const { return densities[raw]; }
  const ScalarField& phi_raw(int raw) const { return potentials[raw]; }

  // raw index of the sample at time t; t must sit on the grid
  int raw_of_time(double t) const {
    double s = t * samples + pad;
    int j = static_cast<int>(std::lround(s));
    if (std::abs(s - j) > 1e-9 || j < 0 || j >= raw_count())
      throw std::invalid_argument("time does not lie on the path sample grid");
    return j;
  }
};

namespace geodesic_detail {

// d(rho)/dt at raw index j: 2nd-order central in the interior of the
// extended range, one-sided at its two ends.
inline ScalarField density_rate(const GeodesicPath& path, int raw) {
  const ManifoldKind& m = path.kind;
  int last = path.raw_count() - 1;
  double dt = path.dt();
  ScalarField r = ScalarField::zeros(m);
  auto& d = path.densities;
  if (raw == 0) {
    for (long i = 0; i < m.points(); ++i)
      r.val[i] = (-3.0 * d[0][i] + 4.0 * d[1][i] - d[2][i]) / (2.0 * dt);
  } else if (raw == last) {
    for (long i = 0; i < m.points(); ++i)
      r.val[i] = (3.0 * d[last][i] - 4.0 * d[last - 1][i] + d[last - 2][i]) / (2.0 * dt);
  } else {
    for (long i = 0; i < m.points(); ++i)
      r.val[i] = (d[raw + 1][i] - d[raw - 1][i]) / (2.0 * dt);
  }
  return r;
}

// 4th-order central rate, used only for the residual report.
inline ScalarField density_rate4(const GeodesicPath& path, int raw) {
  const ManifoldKind& m = path.kind;
  double dt = path.dt();
  auto& d = path.densities;
  ScalarField r = ScalarField::zeros(m);
  for (long i = 0; i < m.points(); ++i)
    r.val[i] = (-d[raw + 2][i] + 8.0 * d[raw + 1][i] - 8.0 * d[raw - 1][i] + d[raw - 2][i]) /
               (12.0 * dt);
  return r;
}

inline ScalarField recover_at_raw(const GeodesicPath& path, int raw,
                                  const ScalarField* guess = nullptr) {
  ScalarField rate = density_rate(path, raw);
  // the continuum rate has zero mean; remove the quadrature remnant
  double mean = 0.0;
  for (double v : rate.val) mean += v;
  mean /= rate.size();
  for (double& v : rate.val) v -= mean;
  PoissonOptions opt;
  opt.initial_guess = guess;
  return solve_weighted_poisson(path.mu_raw(raw), -1.0 * rate, opt);
}

}  // namespace geodesic_detail

// Build the path. `samples` must be a positive multiple of 10 so the 0.1
// extension lands on the sample grid.
inline GeodesicPath generate_geodesic(const Density& mu0, const ScalarField& phi0, int samples) {
  require_same_grid(mu0.kind(), phi0.kind);
  if (samples < 10 || samples % 10 != 0)
    throw std::invalid_argument("sample count must be a positive multiple of 10");

  GeodesicPath path;
  path.kind = mu0.kind();
  path.samples = samples;
  path.pad = static_cast<int>(std::lround(kPathExtension * samples));
  path.generator = gauge_zero_mean(phi0, mu0);
  path.flow = GridFlow::from_potential(path.generator);

  int count = path.raw_count();
  path.min_jacobian = std::numeric_limits<double>::max();
  for (int j = 0; j < count; ++j)
    path.min_jacobian = std::min(path.min_jacobian, path.flow.min_nodal_det(path.time_of_raw(j)));
  if (path.min_jacobian < kInteriorJacobianMargin)
    throw std::domain_error("not a minimizing-geodesic regime");

  Interpolant rho0(mu0.as_field());
  path.densities.reserve(count);
  for (int j = 0; j < count; ++j)
    path.densities.push_back(pushforward_density(mu0, path.flow, path.time_of_raw(j), &rho0));

  path.potentials.reserve(count);
  for (int j = 0; j < count; ++j) {
    const ScalarField* guess = j > 0 ? &path.potentials.back() : nullptr;
    path.potentials.push_back(geodesic_detail::recover_at_raw(path, j, guess));
  }

  double resid = 0.0;
  for (int j = path.pad; j <= path.pad + samples; ++j) {
    ScalarField r = geodesic_detail::density_rate4(path, j) +
                    weighted_div(path.mu_raw(j), grad(path.phi_raw(j)));
    resid = std::max(resid, max_abs(r));
  }
  path.continuity_residual = resid;
  return path;
}

// Potential at nominal sample j from the continuity equation,
// div(rho grad phi) = -d(rho)/dt, gauged to \int phi dmu = 0.
inline ScalarField recover_potential(const GeodesicPath& path, int j) {
  if (j < 0 || j > path.samples) throw std::invalid_argument("sample index out of range");
  return geodesic_detail::recover_at_raw(path, path.raw_of_nominal(j));
}

// sup over sampled t in [t_lo, t_hi] of the pointwise C^2 data of phi(t).
inline double regularity_report(const GeodesicPath& path, double t_lo = 0.0, double t_hi = 1.0) {
  double sup = 0.0;
  for (int j = 0; j <= path.samples; ++j) {
    double t = double(j) / path.samples;
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    const ScalarField& p = path.phi(j);
    sup = std::max(sup, max_abs(p));
    sup = std::max(sup, max_abs(pointwise_norm(grad(p))));
    SymTensorField h = hess(p);
    for (long i = 0; i < path.kind.points(); ++i) {
      double f;
      if (path.kind.grid_axes() == 1) {
        f = std::abs(h.xx[i]);
      } else {
        f = std::sqrt(h.xx[i] * h.xx[i] + 2.0 * h.xy[i] * h.xy[i] + h.yy[i] * h.yy[i]);
      }
      sup = std::max(sup, f);
    }
  }
  return sup;
}

}  // namespace wptlab
