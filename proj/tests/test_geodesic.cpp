#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wptlab/geodesic.hpp"

using namespace wptlab;

namespace {

Density s1_density(int n) {
  auto m = ManifoldKind::circle(n);
  return Density::normalized(
      ScalarField::sample(m, [](double x, double) { return 1.0 + 0.3 * std::cos(x); }));
}

ScalarField s1_potential(int n) {
  return ScalarField::sample(ManifoldKind::circle(n),
                             [](double x, double) { return 0.2 * std::sin(x); });
}

double invert_analytic(double y, double s) {
  double x = y;
  for (int i = 0; i < 60; ++i) {
    double g = x + s * 0.2 * std::cos(x) - y;
    x -= g / (1.0 - s * 0.2 * std::sin(x));
  }
  return x;
}

}  // namespace

TEST_CASE("zero potential generates the constant path") {
  auto m = ManifoldKind::circle(64);
  Density mu0 = s1_density(64);
  GeodesicPath path = generate_geodesic(mu0, ScalarField::zeros(m), 20);
  for (int j = 0; j <= path.samples; ++j)
    for (long i = 0; i < m.points(); ++i) CHECK(path.mu(j)[i] == mu0[i]);
  CHECK(max_abs(path.phi(7)) <= 1e-13);
  CHECK(path.continuity_residual <= 1e-12);
}

TEST_CASE("S1 scenario densities match the closed form at every sample") {
  const int n = 256, T = 100;
  GeodesicPath path = generate_geodesic(s1_density(n), s1_potential(n), T);
  auto m = path.kind;
  double err = 0.0;
  for (int j = 0; j <= T; ++j) {
    double t = double(j) / T;
    for (long i = 0; i < m.points(); ++i) {
      double y = node_coord(m, i)[0];
      double x = invert_analytic(y, t);
      double want = (1.0 + 0.3 * std::cos(x)) / kTwoPi / (1.0 - 0.2 * t * std::sin(x));
      err = std::max(err, std::abs(path.mu(j)[i] - want));
    }
  }
  CHECK(err <= 1e-6);
}

TEST_CASE("T2 scenario conserves mass at every sample") {
  auto m = ManifoldKind::torus2(64);
  Density mu0 = Density::normalized(ScalarField::sample(
      m, [](double x, double y) { return 1.0 + 0.2 * std::cos(x) * std::cos(y); }));
  auto phi0 = ScalarField::sample(
      m, [](double x, double y) { return 0.1 * std::sin(x) + 0.15 * std::sin(y); });
  GeodesicPath path = generate_geodesic(mu0, phi0, 20);
  for (int j = 0; j <= path.samples; ++j) {
    double mass = 0.0;
    for (long i = 0; i < m.points(); ++i) mass += path.mu(j)[i];
    CHECK(std::abs(mass * m.cell_volume() - 1.0) <= 1e-10);
  }
}

TEST_CASE("recover_potential returns zero on the constant path") {
  auto m = ManifoldKind::circle(64);
  GeodesicPath path = generate_geodesic(s1_density(64), ScalarField::zeros(m), 20);
  CHECK(max_abs(recover_potential(path, 10)) <= 1e-13);
}

TEST_CASE("recover_potential matches the generator at t=0") {
  const int n = 256, T = 100;
  GeodesicPath path = generate_geodesic(s1_density(n), s1_potential(n), T);
  ScalarField phi = recover_potential(path, 0);
  VectorField g = grad(phi);
  double err = 0.0;
  for (long i = 0; i < path.kind.points(); ++i)
    err = std::max(err, std::abs(g.comp[0][i] - 0.2 * std::cos(node_coord(path.kind, i)[0])));
  CHECK(err <= 1e-4);
  CHECK(std::abs(integrate(phi, path.mu(0))) <= 1e-10);
}

TEST_CASE("recovered interior potentials match the analytic velocity field") {
  const int n = 256, T = 100;
  GeodesicPath path = generate_geodesic(s1_density(n), s1_potential(n), T);
  // on the flow, grad phi(t) at y equals grad phi0 at the preimage
  int j = T / 2;
  VectorField g = grad(path.phi(j));
  double err = 0.0;
  for (long i = 0; i < path.kind.points(); ++i) {
    double y = node_coord(path.kind, i)[0];
    double x = invert_analytic(y, 0.5);
    err = std::max(err, std::abs(g.comp[0][i] - 0.2 * std::cos(x)));
  }
  CHECK(err <= 1e-4);
}

TEST_CASE("continuity residual decreases at order >= 2 in dt") {
  const int n = 128;
  GeodesicPath coarse = generate_geodesic(s1_density(n), s1_potential(n), 100);
  GeodesicPath fine = generate_geodesic(s1_density(n), s1_potential(n), 200);
  CHECK(coarse.continuity_residual / fine.continuity_residual >= 3.5);
}

TEST_CASE("regularity report: zero path, finite scenario, grid stability") {
  auto m = ManifoldKind::circle(64);
  GeodesicPath flat = generate_geodesic(s1_density(64), ScalarField::zeros(m), 20);
  CHECK(regularity_report(flat) <= 1e-12);

  GeodesicPath a = generate_geodesic(s1_density(256), s1_potential(256), 100);
  GeodesicPath b = generate_geodesic(s1_density(512), s1_potential(512), 100);
  double ra = regularity_report(a), rb = regularity_report(b);
  CHECK(ra > 0.0);
  CHECK(std::isfinite(ra));
  CHECK(ra / rb <= 1.05);
  CHECK(rb / ra <= 1.05);

  // restriction never increases the sup
  CHECK(regularity_report(a, 0.0, 0.5) <= ra + 1e-15);
}

TEST_CASE("paths live strictly inside the extended interval") {
  GeodesicPath path = generate_geodesic(s1_density(128), s1_potential(128), 100);
  CHECK(path.pad == 10);
  CHECK(path.raw_count() == 121);
  CHECK(path.time_of_raw(0) == Catch::Approx(-0.1));
  CHECK(path.time_of_raw(path.raw_count() - 1) == Catch::Approx(1.1));
  CHECK(path.min_jacobian > kInteriorJacobianMargin);
}

TEST_CASE("steep potentials are rejected as non-minimizing") {
  auto m = ManifoldKind::circle(64);
  auto steep = ScalarField::sample(m, [](double x, double) { return 1.5 * std::sin(x); });
  CHECK_THROWS_AS(generate_geodesic(s1_density(64), steep, 20), std::domain_error);
}

TEST_CASE("sample counts must be multiples of 10") {
  auto m = ManifoldKind::circle(64);
  CHECK_THROWS_AS(generate_geodesic(s1_density(64), ScalarField::zeros(m), 25),
                  std::invalid_argument);
}
