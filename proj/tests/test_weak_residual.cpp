#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wptlab/weak_form.hpp"

using namespace wptlab;

namespace {

Density s1_density(int n) {
  auto m = ManifoldKind::circle(n);
  return Density::normalized(
      ScalarField::sample(m, [](double x, double) { return 1.0 + 0.3 * std::cos(x); }));
}

GeodesicPath s1_path(int n, int T) {
  auto phi = ScalarField::sample(ManifoldKind::circle(n),
                                 [](double x, double) { return 0.2 * std::sin(x); });
  return generate_geodesic(s1_density(n), phi, T);
}

TimeSampledField constant_candidate(const GeodesicPath& path, const VectorField& v, int stride) {
  TimeSampledField out;
  for (int j = 0; j <= path.samples; j += stride) {
    int raw = path.raw_of_nominal(j);
    out.samples.push_back(
        TimeSample{path.time_of_raw(raw), path.mu_raw(raw), grad(path.phi_raw(raw)), v});
  }
  return out;
}

}  // namespace

TEST_CASE("battery construction: size caps and time powers") {
  auto c = ManifoldKind::circle(64);
  TestBattery bc = TestBattery::standard(c);
  CHECK(bc.elems.size() == 18);  // 6 spatial modes x 3 time powers
  bool has_linear_time = false;
  for (const auto& e : bc.elems) has_linear_time |= (e.tpow == 1);
  CHECK(has_linear_time);

  auto t = ManifoldKind::torus2(32);
  TestBattery bt = TestBattery::standard(t);
  CHECK(bt.elems.size() == 63);  // capped: 21 spatial modes x 3 time powers

  TestBattery sub = bt.subsample(10, 1234);
  TestBattery sub2 = bt.subsample(10, 1234);
  CHECK(sub.elems.size() == 10);
  for (size_t i = 0; i < sub.elems.size(); ++i) {
    CHECK(sub.elems[i].k == sub2.elems[i].k);
    CHECK(sub.elems[i].tpow == sub2.elems[i].tpow);
  }
}

TEST_CASE("weak residual vanishes identically for the zero triple") {
  GeodesicPath path = s1_path(64, 20);
  VectorField zero = VectorField::zeros(path.kind);
  TimeSampledField v = constant_candidate(path, zero, 1);
  TestBattery bat = TestBattery::standard(path.kind);
  CHECK(weak_residual(path, v, zero, zero, bat) == 0.0);
}

TEST_CASE("constant transport on the constant path is a weak solution") {
  auto m = ManifoldKind::circle(64);
  GeodesicPath path = generate_geodesic(s1_density(64), ScalarField::zeros(m), 20);
  VectorField v = grad(ScalarField::sample(m, [](double x, double) { return std::cos(x); }));
  TimeSampledField cand = constant_candidate(path, v, 1);
  TestBattery bat = TestBattery::standard(m);
  CHECK(weak_residual(path, cand, v, v, bat) <= 1e-10);
}

TEST_CASE("the PDE solution is a weak solution, with order >= 1 refinement decay") {
  const int n = 256;
  TestBattery bat = TestBattery::standard(ManifoldKind::circle(n));

  GeodesicPath coarse = s1_path(n, 480);
  auto eta1c = ScalarField::sample(coarse.kind, [](double x, double) { return std::cos(2 * x); });
  TransportSolution sc = solve_parallel_pde(coarse, eta1c, TransportDirection::backward);
  TimeSampledField vc = sample_pde_solution(coarse, sc);
  double rc = weak_residual(coarse, vc, grad(sc.eta_start()), grad(sc.eta_end()), bat);

  GeodesicPath fine = s1_path(n, 960);
  auto eta1f = ScalarField::sample(fine.kind, [](double x, double) { return std::cos(2 * x); });
  TransportSolution sf = solve_parallel_pde(fine, eta1f, TransportDirection::backward);
  TimeSampledField vf = sample_pde_solution(fine, sf);
  double rf = weak_residual(fine, vf, grad(sf.eta_start()), grad(sf.eta_end()), bat);

  CHECK(rc <= 1e-3);
  CHECK(rf <= 1e-3);
  CHECK(rc / rf >= 2.0);
}

TEST_CASE("residual is sublinear under triple addition") {
  GeodesicPath path = s1_path(64, 20);
  auto m = path.kind;
  TestBattery bat = TestBattery::standard(m);
  VectorField a = grad(ScalarField::sample(m, [](double x, double) { return std::sin(x); }));
  VectorField b = grad(ScalarField::sample(m, [](double x, double) { return std::cos(2 * x); }));
  TimeSampledField va = constant_candidate(path, a, 1);
  TimeSampledField vb = constant_candidate(path, b, 1);
  TimeSampledField vab = constant_candidate(path, a + b, 1);
  double ra = weak_residual(path, va, a, a, bat);
  double rb = weak_residual(path, vb, b, b, bat);
  double rab = weak_residual(path, vab, a + b, a + b, bat);
  CHECK(rab <= ra + rb + 1e-12);
}

TEST_CASE("the checker detects a corrupted endpoint") {
  const int n = 128;
  GeodesicPath path = s1_path(n, 240);
  auto m = path.kind;
  TestBattery bat = TestBattery::standard(m);
  auto eta1 = ScalarField::sample(m, [](double x, double) { return std::cos(2 * x); });
  TransportSolution sol = solve_parallel_pde(path, eta1, TransportDirection::backward);
  TimeSampledField v = sample_pde_solution(path, sol);
  VectorField v0 = grad(sol.eta_start());
  VectorField v1 = grad(sol.eta_end());
  double base = weak_residual(path, v, v0, v1, bat);

  VectorField bump = grad(ScalarField::sample(m, [](double x, double) { return std::sin(x); }));
  double corrupted = weak_residual(path, v, v0, v1 + bump, bat);

  // worst battery element pairing with the corruption at t = 1
  double strongest = 0.0;
  for (const auto& e : bat.elems) {
    BatteryModeFields mode = sample_mode(m, e);
    strongest =
        std::max(strongest, std::abs(otto_inner(path.mu(path.samples), mode.gradient, bump)));
  }
  CHECK(base <= 1e-3);
  CHECK(corrupted >= 0.9 * strongest);
}
