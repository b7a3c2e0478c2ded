#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wptlab/measure.hpp"

using namespace wptlab;

namespace {

Density uniform_circle(int n) {
  auto m = ManifoldKind::circle(n);
  return Density::normalized(ScalarField::sample(m, [](double, double) { return 1.0; }));
}

// independent scalar Newton on the analytic map x -> x + s*a*cos(x)
double invert_analytic(double y, double s, double a) {
  double x = y;
  for (int i = 0; i < 60; ++i) {
    double g = x + s * a * std::cos(x) - y;
    x -= g / (1.0 - s * a * std::sin(x));
  }
  return x;
}

}  // namespace

TEST_CASE("density construction enforces floor and mass") {
  auto m = ManifoldKind::circle(32);
  std::vector<double> vals(32, 1.0 / kTwoPi);
  CHECK_NOTHROW(Density(m, vals));
  vals[3] = 0.0;  // below the floor
  CHECK_THROWS_AS(Density(m, vals), std::invalid_argument);
  std::vector<double> offmass(32, 1.01 / kTwoPi);
  CHECK_THROWS_AS(Density(m, offmass), std::invalid_argument);
}

TEST_CASE("integrate: normalization, symmetry, exact quadrature") {
  Density mu = uniform_circle(128);
  auto m = mu.kind();
  auto one = ScalarField::sample(m, [](double, double) { return 1.0; });
  CHECK(integrate(one, mu) == Catch::Approx(1.0).margin(1e-14));

  auto cosx = ScalarField::sample(m, [](double x, double) { return std::cos(x); });
  CHECK(std::abs(integrate(cosx, mu)) <= 1e-12);

  auto cos2 = ScalarField::sample(m, [](double x, double) { return std::cos(x) * std::cos(x); });
  CHECK(integrate(cos2, mu) == Catch::Approx(0.5).margin(1e-10));
}

TEST_CASE("otto inner product: orthogonality, value, symmetry") {
  Density mu = uniform_circle(128);
  auto m = mu.kind();
  VectorField gs = grad(ScalarField::sample(m, [](double x, double) { return std::sin(x); }));
  VectorField gc = grad(ScalarField::sample(m, [](double x, double) { return std::cos(x); }));
  CHECK(std::abs(otto_inner(mu, gs, gc)) <= 1e-12);
  CHECK(otto_inner(mu, gs, gs) == Catch::Approx(0.5).margin(1e-10));
  CHECK(otto_inner(mu, gs, gc) == otto_inner(mu, gc, gs));
  CHECK(otto_inner(mu, gs, gs) >= 0.0);
}

TEST_CASE("pushforward by the identity returns the density unchanged") {
  auto m = ManifoldKind::circle(64);
  Density mu = Density::normalized(
      ScalarField::sample(m, [](double x, double) { return 1.0 + 0.3 * std::cos(x); }));
  GridFlow flow(VectorField::zeros(m));
  Density out = pushforward_density(mu, flow, 1.0);
  for (long i = 0; i < mu.size(); ++i) CHECK(out[i] == mu[i]);
}

TEST_CASE("pushforward of the uniform density by a rotation stays uniform") {
  auto m = ManifoldKind::circle(64);
  Density mu = uniform_circle(64);
  VectorField shift = VectorField::sample(m, [](double, double) {
    return std::array<double, 2>{0.7, 0.0};
  });
  Density out = pushforward_density(mu, GridFlow(shift), 1.0);
  for (long i = 0; i < mu.size(); ++i)
    CHECK(out[i] == Catch::Approx(1.0 / kTwoPi).margin(1e-13));
}

TEST_CASE("pushforward against the closed-form change of variables") {
  const int n = 256;
  auto m = ManifoldKind::circle(n);
  Density mu0 = Density::normalized(
      ScalarField::sample(m, [](double x, double) { return 1.0 + 0.3 * std::cos(x); }));
  auto phi = ScalarField::sample(m, [](double x, double) { return 0.2 * std::sin(x); });
  GridFlow flow = GridFlow::from_potential(phi);
  for (double t : {0.3, 0.7, 1.0}) {
    Density rt = pushforward_density(mu0, flow, t);
    double err = 0.0;
    for (long i = 0; i < m.points(); ++i) {
      double y = node_coord(m, i)[0];
      double x = invert_analytic(y, t, 0.2);
      double want = (1.0 + 0.3 * std::cos(x)) / kTwoPi / (1.0 - 0.2 * t * std::sin(x));
      err = std::max(err, std::abs(rt[i] - want));
    }
    CHECK(err <= 1e-6);

    double mass = 0.0;
    for (long i = 0; i < m.points(); ++i) mass += rt[i];
    CHECK(std::abs(mass * m.cell_volume() - 1.0) <= 1e-10);
  }
}

TEST_CASE("pushforward duality against a trigonometric battery") {
  const int n = 256;
  auto m = ManifoldKind::circle(n);
  Density mu0 = Density::normalized(
      ScalarField::sample(m, [](double x, double) { return 1.0 + 0.3 * std::cos(x); }));
  auto phi = ScalarField::sample(m, [](double x, double) { return 0.2 * std::sin(x); });
  GridFlow flow = GridFlow::from_potential(phi);
  const double t = 0.85;
  Density rt = pushforward_density(mu0, flow, t);
  for (int k = 1; k <= 3; ++k) {
    for (int ph = 0; ph < 2; ++ph) {
      auto f = ScalarField::sample(m, [&](double x, double) {
        return ph ? std::sin(k * x) : std::cos(k * x);
      });
      double lhs = integrate(f, rt);
      double rhs = 0.0;
      for (long i = 0; i < m.points(); ++i) {
        double x = node_coord(m, i)[0];
        double y = x + t * 0.2 * std::cos(x);
        rhs += (ph ? std::sin(k * y) : std::cos(k * y)) * mu0[i];
      }
      rhs *= m.cell_volume();
      CHECK(std::abs(lhs - rhs) <= 1e-6);
    }
  }
}

TEST_CASE("pushforward on the torus conserves mass") {
  auto m = ManifoldKind::torus2(64);
  Density mu0 = Density::normalized(ScalarField::sample(
      m, [](double x, double y) { return 1.0 + 0.2 * std::cos(x) * std::cos(y); }));
  auto phi = ScalarField::sample(
      m, [](double x, double y) { return 0.1 * std::sin(x) + 0.15 * std::sin(y); });
  GridFlow flow = GridFlow::from_potential(phi);
  Density rt = pushforward_density(mu0, flow, 1.0);
  double mass = 0.0;
  for (long i = 0; i < m.points(); ++i) mass += rt[i];
  CHECK(std::abs(mass * m.cell_volume() - 1.0) <= 1e-10);
}

TEST_CASE("pushforward rejects maps with degenerate Jacobian") {
  auto m = ManifoldKind::circle(64);
  Density mu = uniform_circle(64);
  auto phi = ScalarField::sample(m, [](double x, double) { return 2.0 * std::sin(x); });
  GridFlow flow = GridFlow::from_potential(phi);
  CHECK_THROWS_AS(pushforward_density(mu, flow, 1.0), std::domain_error);
}

TEST_CASE("atomic measure validation") {
  CHECK_NOTHROW(AtomicMeasure({{{0.1, 0, 0}}, {{0.2, 0, 0}}}, {0.5, 0.5}));
  CHECK_THROWS_AS(AtomicMeasure({{{0.1, 0, 0}}}, {0.9}), std::invalid_argument);
  CHECK_THROWS_AS(AtomicMeasure({{{0.1, 0, 0}}, {{0.2, 0, 0}}}, {1.5, -0.5}),
                  std::invalid_argument);
}
