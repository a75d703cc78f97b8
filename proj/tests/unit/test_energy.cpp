// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "support/fixtures.hpp"
#include "tvflow/energy.hpp"
#include "tvflow/error.hpp"

using namespace tvflow;

namespace {

ScalarField interior_field(const Grid& g, std::vector<double> inner) {
  return extend_with_boundary(inner, ScalarField(g));
}

}  // namespace

TEST_CASE("total variation worked examples") {
  const Grid g = fixtures::line(3, 1.0);
  const ScalarField zero(g);
  CHECK(total_variation(interior_field(g, {0, 1, 0}), zero) == 2.0);
  CHECK(total_variation(interior_field(g, {1, 1, 1}), zero) == 2.0);
  const ScalarField c(g, 4.0);
  CHECK(total_variation(c, c) == 0.0);
}

TEST_CASE("area functional worked examples") {
  const Grid g = fixtures::line(3, 1.0);
  const ScalarField zero(g);
  CHECK(area_functional(interior_field(g, {1, 1, 1}), zero, 1.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(area_functional(zero, zero, -0.1), InvalidArgument);
  std::mt19937_64 rng(9);
  const auto u = fixtures::random_scalar(g, rng);
  CHECK(area_functional(u, zero, 0.0) == total_variation(u, zero));
}

TEST_CASE("area sandwich TV <= A_mu <= TV + mu |Omega|") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g = trial % 2 ? fixtures::line(10, 0.1) : fixtures::plane(5, 4, 0.25);
    const auto u = fixtures::random_scalar(g, rng);
    const auto u0 = fixtures::random_scalar(g, rng);
    const double tv = total_variation(u, u0);
    const double a = area_functional(u, u0, 0.1);
    CHECK(a - tv >= -1e-14);
    CHECK(a - tv <= 0.1 * g.domain_volume() + 1e-12);
  }
}

TEST_CASE("fenchel_gap worked examples") {
  const std::vector<double> z{3.0 / 13.0, 4.0 / 13.0}, v{0.3, 0.4};
  CHECK(std::abs(fenchel_gap(z, v, 1.2)) <= 1e-12);
  CHECK(fenchel_gap(std::vector<double>{0, 0}, std::vector<double>{1, 0}, 1.0) ==
        doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK(fenchel_gap(std::vector<double>{0, 0}, std::vector<double>{0, 0}, 1.0) == 0.0);
  CHECK_THROWS_AS(fenchel_gap(std::vector<double>{1.1, 0}, v, 1.0), InvalidArgument);
  CHECK_THROWS_AS(fenchel_gap(z, v, 0.0), InvalidArgument);
}

TEST_CASE("fenchel_gap is nonnegative and vanishes at the equality case") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0), m(1e-3, 2.0), big(-5.0, 5.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> z{u(rng), u(rng)}, v{big(rng), big(rng)};
    const double n = std::hypot(z[0], z[1]);
    if (n > 1.0) z = {z[0] / n, z[1] / n};
    const double mu = m(rng);
    CHECK(fenchel_gap(z, v, mu) >= -1e-12);
    const double s = std::sqrt(mu * mu + v[0] * v[0] + v[1] * v[1]);
    CHECK(fenchel_gap(std::vector<double>{v[0] / s, v[1] / s}, v, mu) <= 1e-10);
  }
}

TEST_CASE("conjugate density worked examples") {
  CHECK(conjugate_density(std::vector<double>{0, 0}, 1.0) == -1.0);
  CHECK(conjugate_density(std::vector<double>{0.6, 0.8}, 3.0) == doctest::Approx(0.0));
  CHECK(conjugate_density(std::vector<double>{0.3, 0.4}, 2.0) == doctest::Approx(-std::sqrt(3.0)));
  CHECK_THROWS_AS(conjugate_density(std::vector<double>{1.0, 0.1}, 1.0), InvalidArgument);
}

TEST_CASE("psi worked examples") {
  const Grid g = fixtures::line(3, 1.0);
  const EnergyParams p{1.0, 1.0, ScalarField(g), ScalarField(g)};
  CHECK(psi(ScalarField(g), p) == doctest::Approx(3.0));

  std::mt19937_64 rng(13);
  const auto u = fixtures::random_scalar(g, rng);
  const EnergyParams q{0.7, 0.0, ScalarField(g), ScalarField(g)};
  CHECK(psi(u, q) == area_functional(u, q.u0, 0.7));
}

TEST_CASE("psi against a direct summation oracle") {
  const Grid g = fixtures::line(4, 0.25);
  const EnergyParams p{0.5, 0.5, ScalarField(g, 1.0), ScalarField(g)};
  const auto u = interior_field(g, {0.2, 0.2, 0.2, 0.2});
  // cells 0..2 own a zero interior difference, cell 3 owns none: 4 * 0.5 * h;
  // boundary jumps 0.2 each (|g| h = jump); zero-order terms sum (0.25 * 0.04 + 0.2) h.
  const double h = 0.25;
  const double expected = 4 * 0.5 * h + 2 * 0.2 + 4 * (0.5 * 0.5 * 0.04 + 1.0 * 0.2) * h;
  CHECK(psi(u, p) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("TV and A_mu are convex along segments") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  const Grid g = fixtures::plane(4, 4, 0.25);
  const auto u0 = fixtures::random_scalar(g, rng);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = fixtures::random_scalar(g, rng);
    const auto b = fixtures::random_scalar(g, rng);
    const double th = t(rng);
    ScalarField c(g);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = th * a[i] + (1 - th) * b[i];
    for (double mu : {0.0, 0.5}) {
      const double fa = area_functional(a, u0, mu), fb = area_functional(b, u0, mu);
      const double fc = area_functional(c, u0, mu);
      CHECK(fc <= th * fa + (1 - th) * fb + 1e-12 * (1 + fa + fb));
    }
  }
}

TEST_CASE("TV vanishes exactly for constant extensions") {
  const Grid g = fixtures::plane(3, 3, 1.0);
  const ScalarField c(g, -2.0);
  CHECK(total_variation(c, c) == 0.0);
  auto bumped = c;
  bumped.at(1, 1) = -1.0;
  CHECK(total_variation(bumped, c) > 0.0);
  auto collar = c;
  collar.at(-1, 0) = 0.0;
  CHECK(total_variation(c, collar) > 0.0);
}

TEST_CASE("conjugate mass counts empty groups") {
  const Grid g = fixtures::line(4, 0.25);
  CHECK(conjugate_mass(FaceVectorField(g), 2.0) == doctest::Approx(2.0));
  CHECK(conjugate_mass(FaceVectorField(g, 1.0), 2.0) == doctest::Approx(2.0 * 0.25));
}
