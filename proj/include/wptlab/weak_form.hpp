#pragma once

// The weak parallel-transport identity: for every smooth test function f,
//
//   int <grad f(1), V1> dmu_1 - int <grad f(0), V0> dmu_0
//     = int_0^1 int ( <grad df/dt, V> + Hess_f(V, grad phi) ) dmu_t dt.
//
// weak_residual evaluates the worst defect over a battery of separable test
// functions t^a * T_b(x) with low trigonometric spatial modes.

#include <random>

#include "wptlab/transport_pde.hpp"

namespace wptlab {

struct BatteryElement {
  int tpow = 0;                    // time power a in {0,1,2}
  std::array<int, 2> k{0, 0};      // wavenumber per axis (0 = constant factor)
  std::array<int, 2> phase{0, 0};  // 0 = cos, 1 = sin
};

namespace battery_detail {

inline double factor(int k, int ph, double x) {
  if (k == 0) return 1.0;
  return ph ? std::sin(k * x) : std::cos(k * x);
}
inline double dfactor(int k, int ph, double x) {
  if (k == 0) return 0.0;
  return ph ? k * std::cos(k * x) : -k * std::sin(k * x);
}
inline double ddfactor(int k, int ph, double x) { return -double(k) * k * factor(k, ph, x); }

}  // namespace battery_detail

struct TestBattery {
  ManifoldKind kind{};
  std::vector<BatteryElement> elems;

  // All t^a T_b with per-axis trigonometric degree <= max_mode, ordered by
  // total spatial degree and capped at `cap` elements.
  static TestBattery standard(const ManifoldKind& m, int max_mode = 3, int cap = 63) {
    require_grid(m);
    struct AxisOpt {
      int k, ph;
    };
    std::vector<AxisOpt> axis{{0, 0}};
    for (int k = 1; k <= max_mode; ++k) {
      axis.push_back({k, 0});
      axis.push_back({k, 1});
    }
    std::vector<BatteryElement> modes;
    if (m.grid_axes() == 1) {
      for (const auto& a : axis)
        if (a.k > 0) modes.push_back({0, {a.k, 0}, {a.ph, 0}});
    } else {
      for (const auto& a : axis)
        for (const auto& b : axis)
          if (a.k > 0 || b.k > 0) modes.push_back({0, {a.k, b.k}, {a.ph, b.ph}});
    }
    std::stable_sort(modes.begin(), modes.end(),
                     [](const BatteryElement& a, const BatteryElement& b) {
                       return a.k[0] + a.k[1] < b.k[0] + b.k[1];
                     });
    int per_time = std::max(1, cap / 3);
    if (static_cast<int>(modes.size()) > per_time) modes.resize(per_time);

    TestBattery bat;
    bat.kind = m;
    for (int a = 0; a <= 2; ++a)
      for (const auto& mode : modes) {
        BatteryElement e = mode;
        e.tpow = a;
        bat.elems.push_back(e);
      }
    return bat;
  }

  // Deterministic random subsample (Fisher-Yates with a seeded generator).
  TestBattery subsample(size_t count, unsigned seed) const {
    TestBattery out;
    out.kind = kind;
    std::vector<BatteryElement> pool = elems;
    std::mt19937 rng(seed);
    size_t keep = std::min(count, pool.size());
    for (size_t i = 0; i < keep; ++i) {
      size_t j = i + rng() % (pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.elems.push_back(pool[i]);
    }
    return out;
  }
};

// Spatial part of a battery element sampled on the grid.
struct BatteryModeFields {
  VectorField gradient;
  SymTensorField hessian;
};

inline BatteryModeFields sample_mode(const ManifoldKind& m, const BatteryElement& e) {
  using namespace battery_detail;
  BatteryModeFields out;
  out.gradient = VectorField::zeros(m);
  out.hessian.kind = m;
  out.hessian.xx.assign(m.points(), 0.0);
  if (m.grid_axes() == 2) {
    out.hessian.xy.assign(m.points(), 0.0);
    out.hessian.yy.assign(m.points(), 0.0);
  }
  for (long i = 0; i < m.points(); ++i) {
    auto xy = node_coord(m, i);
    double fx = factor(e.k[0], e.phase[0], xy[0]);
    double dx = dfactor(e.k[0], e.phase[0], xy[0]);
    double ddx = ddfactor(e.k[0], e.phase[0], xy[0]);
    if (m.grid_axes() == 1) {
      out.gradient.comp[0][i] = dx;
      out.hessian.xx[i] = ddx;
    } else {
      double fy = factor(e.k[1], e.phase[1], xy[1]);
      double dy = dfactor(e.k[1], e.phase[1], xy[1]);
      double ddy = ddfactor(e.k[1], e.phase[1], xy[1]);
      out.gradient.comp[0][i] = dx * fy;
      out.gradient.comp[1][i] = fx * dy;
      out.hessian.xx[i] = ddx * fy;
      out.hessian.xy[i] = dx * dy;
      out.hessian.yy[i] = fx * ddy;
    }
  }
  return out;
}

// A candidate transport field sampled in time, together with the measure and
// velocity potential gradient at each sample. Duplicate times are allowed
// (piecewise-smooth candidates carry both one-sided values).
struct TimeSample {
  double t = 0.0;
  Density mu;
  VectorField phi_grad;
  VectorField v;
};

struct TimeSampledField {
  std::vector<TimeSample> samples;
};

inline TimeSampledField sample_pde_solution(const GeodesicPath& path,
                                            const TransportSolution& sol) {
  TimeSampledField out;
  out.samples.reserve(sol.count());
  for (int s = 0; s < sol.count(); ++s) {
    int raw = sol.raw_sample[s];
    out.samples.push_back(TimeSample{path.time_of_raw(raw), path.mu_raw(raw),
                                     grad(path.phi_raw(raw)), grad(sol.eta[s])});
  }
  return out;
}

// Max over the battery of |LHS - RHS| of the weak identity, time integrals by
// the trapezoid rule on the candidate's samples.
inline double weak_residual(const GeodesicPath& path, const TimeSampledField& v,
                            const VectorField& v0, const VectorField& v1,
                            const TestBattery& battery) {
  if (battery.elems.empty()) throw std::invalid_argument("empty test battery");
  if (v.samples.size() < 2) throw std::invalid_argument("need at least two time samples");
  if (std::abs(v.samples.front().t) > 1e-12 || std::abs(v.samples.back().t - 1.0) > 1e-12)
    throw std::invalid_argument("candidate samples must span [0, 1]");

  const Density& mu0 = path.mu(0);
  const Density& mu1 = path.mu(path.samples);
  size_t ns = v.samples.size();

  // group elements by spatial mode so the heavy integrals are shared
  double worst = 0.0;
  std::vector<char> done(battery.elems.size(), 0);
  for (size_t e = 0; e < battery.elems.size(); ++e) {
    if (done[e]) continue;
    const BatteryElement& el = battery.elems[e];
    BatteryModeFields mode = sample_mode(battery.kind, el);
    std::vector<double> i1(ns), i2(ns);
    for (size_t s = 0; s < ns; ++s) {
      const TimeSample& ts = v.samples[s];
      i1[s] = otto_inner(ts.mu, mode.gradient, ts.v);
      i2[s] = integrate(hess_bilinear(mode.hessian, ts.v, ts.phi_grad), ts.mu);
    }
    double lhs1 = otto_inner(mu1, mode.gradient, v1);
    double lhs0 = otto_inner(mu0, mode.gradient, v0);
    for (size_t e2 = e; e2 < battery.elems.size(); ++e2) {
      const BatteryElement& el2 = battery.elems[e2];
      if (el2.k != el.k || el2.phase != el.phase) continue;
      done[e2] = 1;
      int a = el2.tpow;
      double rhs = 0.0;
      for (size_t s = 0; s + 1 < ns; ++s) {
        double ta = v.samples[s].t, tb = v.samples[s + 1].t;
        auto integrand = [&](size_t idx, double t) {
          double dcoef = a == 0 ? 0.0 : a * std::pow(t, a - 1);
          return dcoef * i1[idx] + std::pow(t, a) * i2[idx];
        };
        rhs += 0.5 * (tb - ta) * (integrand(s, ta) + integrand(s + 1, tb));
      }
      double lhs = lhs1 - (a == 0 ? lhs0 : 0.0);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

}  // namespace wptlab
