#pragma once

// The smooth parallel transport equation along a geodesic path:
// div(rho (grad d(eta)/dt + Hess(eta) grad phi)) = 0, integrated by classical
// RK4 over pairs of path samples so that every stage sits on stored data.
// Solutions are gauged to \int eta dmu_t = 0 at every stored sample.

#include "wptlab/geodesic.hpp"

namespace wptlab {

enum class TransportDirection { forward, backward };

// Initial-guess policy for the per-stage elliptic solves; solutions must
// agree across policies (uniqueness up to additive constants).
enum class EllipticGuess { zero, warm };

struct TransportSolution {
  TransportDirection direction = TransportDirection::backward;
  double dt = 0.0;                 // path sample spacing (RK step is 2*dt)
  std::vector<int> raw_sample;     // ascending raw path indices, stride 2
  std::vector<double> times;       // nominal times of the samples
  std::vector<ScalarField> eta;    // indexed like raw_sample
  double pairing_drift = 0.0;      // relative drift of <grad eta, grad eta>

  int count() const { return static_cast<int>(eta.size()); }
  const ScalarField& eta_start() const { return eta.front(); }
  const ScalarField& eta_end() const { return eta.back(); }
};

namespace pde_detail {

// d(eta)/dt from the elliptic rearrangement of the transport equation.
inline ScalarField eta_rate(const Density& mu, const ScalarField& phi, const ScalarField& eta,
                            const PoissonOptions& opt) {
  VectorField y = tensor_apply(hess(eta), grad(phi));
  ScalarField rhs = -1.0 * weighted_div(mu, y);
  return solve_weighted_poisson(mu, rhs, opt);
}

}  // namespace pde_detail

inline TransportSolution solve_parallel_pde(const GeodesicPath& path, const ScalarField& eta_end,
                                            TransportDirection direction,
                                            EllipticGuess guess = EllipticGuess::warm) {
  require_same_grid(path.kind, eta_end.kind);
  if (path.samples % 2 != 0)
    throw std::invalid_argument("parallel transport needs an even path sample count");
  if (!std::isfinite(regularity_report(path)))
    throw std::domain_error("path regularity report is not finite");

  const int steps = path.samples / 2;
  const bool backward = direction == TransportDirection::backward;
  const int raw_begin = backward ? path.raw_of_nominal(path.samples) : path.raw_of_nominal(0);
  const int stride = backward ? -2 : 2;
  const double h = stride * path.dt();

  TransportSolution sol;
  sol.direction = direction;
  sol.dt = path.dt();

  ScalarField eta = gauge_zero_mean(eta_end, path.mu_raw(raw_begin));
  std::vector<ScalarField> stored;
  stored.reserve(steps + 1);
  stored.push_back(eta);

  ScalarField last_rate = ScalarField::zeros(path.kind);
  bool have_rate = false;
  auto rate = [&](int raw, const ScalarField& e) {
    PoissonOptions opt;
    if (guess == EllipticGuess::warm && have_rate) opt.initial_guess = &last_rate;
    ScalarField r = pde_detail::eta_rate(path.mu_raw(raw), path.phi_raw(raw), e, opt);
    last_rate = r;
    have_rate = true;
    return r;
  };

  int raw = raw_begin;
  for (int s = 0; s < steps; ++s) {
    int mid = raw + stride / 2;
    int next = raw + stride;
    ScalarField k1 = rate(raw, eta);

    ScalarField e2 = eta;
    axpy(0.5 * h, k1, e2);
    ScalarField k2 = rate(mid, e2);

    ScalarField e3 = eta;
    axpy(0.5 * h, k2, e3);
    ScalarField k3 = rate(mid, e3);

    ScalarField e4 = eta;
    axpy(h, k3, e4);
    ScalarField k4 = rate(next, e4);

    ScalarField inc = ScalarField::zeros(path.kind);
    axpy(h / 6.0, k1, inc);
    axpy(h / 3.0, k2, inc);
    axpy(h / 3.0, k3, inc);
    axpy(h / 6.0, k4, inc);
    if (max_abs(inc) != 0.0) {
      axpy(1.0, inc, eta);
      eta = gauge_zero_mean(eta, path.mu_raw(next));
    }
    stored.push_back(eta);
    raw = next;
  }

  sol.raw_sample.resize(steps + 1);
  sol.times.resize(steps + 1);
  sol.eta.resize(steps + 1);
  for (int s = 0; s <= steps; ++s) {
    int pos = backward ? steps - s : s;
    sol.raw_sample[pos] = raw_begin + stride * s;
    sol.times[pos] = path.time_of_raw(sol.raw_sample[pos]);
    sol.eta[pos] = std::move(stored[s]);
  }

  // conservation drift of the transported energy, Lemma-4.7 style
  double first = 0.0, lo = 0.0, hi = 0.0;
  for (int s = 0; s <= steps; ++s) {
    VectorField g = grad(sol.eta[s]);
    double p = otto_inner(path.mu_raw(sol.raw_sample[s]), g, g);
    if (s == 0) first = lo = hi = p;
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  sol.pairing_drift = first > 0.0 ? (hi - lo) / first : hi - lo;
  if (sol.pairing_drift > 1e-2)
    throw std::runtime_error("resolution insufficient: conservation drift exceeds 1e-2");
  return sol;
}

// j -> \int <grad eta_a, grad eta_b> dmu at the shared solution samples.
inline std::vector<double> pairing_series(const GeodesicPath& path, const TransportSolution& a,
                                          const TransportSolution& b) {
  if (a.raw_sample != b.raw_sample)
    throw std::invalid_argument("solutions sampled on different grids");
  std::vector<double> out(a.count());
  for (int s = 0; s < a.count(); ++s)
    out[s] = otto_inner(path.mu_raw(a.raw_sample[s]), grad(a.eta[s]), grad(b.eta[s]));
  return out;
}

// Time polynomial with field coefficients: f(t) = sum_a t^a coeff[a].
struct TimeScalarPoly {
  std::vector<ScalarField> coeff;

  ScalarField at(double t) const {
    ScalarField f = coeff.at(0);
    double p = 1.0;
    for (size_t a = 1; a < coeff.size(); ++a) {
      p *= t;
      axpy(p, coeff[a], f);
    }
    return f;
  }

  ScalarField dt_at(double t) const {
    ScalarField f = ScalarField::zeros(coeff.at(0).kind);
    double p = 1.0;
    for (size_t a = 1; a < coeff.size(); ++a) {
      axpy(a * p, coeff[a], f);
      p *= t;
    }
    return f;
  }
};

// Max over interior solution samples of the defect in the identity
// d/dt \int <grad f, grad eta> dmu = \int <grad df/dt, grad eta> dmu
//                                   + \int Hess_f(grad eta, grad phi) dmu,
// with d/dt taken by central differences on the solution grid.
inline double lemma49_identity_check(const GeodesicPath& path, const TransportSolution& sol,
                                     const TimeScalarPoly& f) {
  int n = sol.count();
  std::vector<double> series(n);
  for (int s = 0; s < n; ++s) {
    double t = path.time_of_raw(sol.raw_sample[s]);
    series[s] = otto_inner(path.mu_raw(sol.raw_sample[s]), grad(f.at(t)), grad(sol.eta[s]));
  }
  double hstep = 2.0 * sol.dt;
  double worst = 0.0;
  for (int s = 1; s + 1 < n; ++s) {
    int raw = sol.raw_sample[s];
    double t = path.time_of_raw(raw);
    const Density& mu = path.mu_raw(raw);
    VectorField ge = grad(sol.eta[s]);
    double lhs = (series[s + 1] - series[s - 1]) / (2.0 * hstep);
    double term1 = otto_inner(mu, grad(f.dt_at(t)), ge);
    double term2 = integrate(hess_bilinear(hess(f.at(t)), ge, grad(path.phi_raw(raw))), mu);
    worst = std::max(worst, std::abs(lhs - term1 - term2));
  }
  return worst;
}

}  // namespace wptlab
