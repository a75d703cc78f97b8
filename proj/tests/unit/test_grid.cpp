// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "support/fixtures.hpp"
#include "tvflow/error.hpp"
#include "tvflow/grid.hpp"

using namespace tvflow;

TEST_CASE("1D grid counts") {
  const Grid g = fixtures::line(4, 0.25);
  CHECK(g.interior_count() == 4);
  CHECK(g.collar_count() == 2);
  CHECK(g.face_count() == 5);
  CHECK(g.cell_volume() == 0.25);
  CHECK(g.face_area() == 1.0);
  CHECK(g.domain_volume() == 1.0);
}

TEST_CASE("2D 3x3 grid counts match a hand enumeration") {
  // Hand count: x-faces are 4 per row over 3 rows, y-faces 4 per column over 3 columns.
  int x_faces = 0, y_faces = 0;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i <= 3; ++i) ++x_faces;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= 3; ++j) ++y_faces;
  }
  const Grid g = fixtures::plane(3, 3, 1.0);
  CHECK(g.interior_count() == 9);
  CHECK(g.collar_count() == 16);
  CHECK(g.face_count() == static_cast<std::size_t>(x_faces + y_faces));
  CHECK(g.face_count() == 24);
  CHECK(g.boundary_faces().size() == 12);
  CHECK(g.cell_volume() == 1.0);
}

TEST_CASE("invalid specs are rejected") {
  GridSpec s;
  s.shape = {0, 1};
  CHECK_THROWS_AS(build_grid(s), InvalidArgument);
  s.shape = {4, 1};
  s.spacing = 0.0;
  CHECK_THROWS_AS(build_grid(s), InvalidArgument);
  s.spacing = -1.0;
  CHECK_THROWS_AS(build_grid(s), InvalidArgument);
  s.spacing = 1.0;
  s.collar_width = 0;
  CHECK_THROWS_AS(build_grid(s), InvalidArgument);
  s.collar_width = 1;
  s.dimension = 3;
  CHECK_THROWS_AS(build_grid(s), InvalidArgument);
}

TEST_CASE("wider collars add ghost cells but no faces") {
  const Grid g = fixtures::line(4, 0.25, 0.0, 3);
  CHECK(g.collar_count() == 6);
  CHECK(g.face_count() == 5);
  const Grid p = fixtures::plane(3, 2, 1.0, 2);
  CHECK(p.collar_count() == 7 * 6 - 6);
  CHECK(p.face_count() == 4 * 2 + 3 * 3);
}

TEST_CASE("fields validate size and finiteness") {
  const Grid g = fixtures::line(3, 1.0);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(4)), InvalidArgument);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>{0, 1, NAN, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(FaceVectorField(g, std::vector<double>(3)), InvalidArgument);
  CHECK_NOTHROW(FaceVectorField(g, std::vector<double>(4)));
}

TEST_CASE("gradient, 1D worked example") {
  const Grid g = fixtures::line(3, 1.0);
  const ScalarField u(g, std::vector<double>{0, 0, 1, 3, 0});
  const auto z = gradient(u);
  CHECK(std::vector<double>(z.values().begin(), z.values().end()) == std::vector<double>{0, 1, 2, -3});
}

TEST_CASE("gradient of a constant is zero, divergence of zero is zero") {
  const Grid g = fixtures::plane(4, 3, 0.5);
  const auto z = gradient(ScalarField(g, 2.5));
  for (double v : z.values()) CHECK(v == 0.0);
  const auto d = divergence(FaceVectorField(g));
  for (double v : d.values()) CHECK(v == 0.0);
}

TEST_CASE("gradient of the x coordinate on a 2x2 grid") {
  const Grid g = fixtures::plane(2, 2, 1.0);
  const auto u = fixtures::tabulate(g, [&](int i, int j) { return g.cell_center(i, j)[0]; });
  const auto z = gradient(u);
  for (std::size_t f = 0; f < g.x_face_count(); ++f) CHECK(z[f] == doctest::Approx(1.0));
  for (std::size_t f = g.x_face_count(); f < g.face_count(); ++f) CHECK(z[f] == 0.0);
}

TEST_CASE("divergence worked examples") {
  const Grid g = fixtures::line(2, 1.0);
  const FaceVectorField z(g, std::vector<double>{0, 1, 0});
  const auto d = divergence(z);
  CHECK(d.at(0) == 1.0);
  CHECK(d.at(1) == -1.0);
  CHECK(d.at(-1) == 0.0);
  CHECK(d.at(2) == 0.0);

  const Grid l = fixtures::line(5, 0.2);
  const auto c = divergence(FaceVectorField(l, 0.7));
  for (int i = 0; i < 5; ++i) CHECK(c.at(i) == 0.0);
}

TEST_CASE("adjointness against a direct summation oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid g = trial % 2 ? fixtures::line(5, 0.3) : fixtures::plane(4, 3, 0.7);
    const auto u = fixtures::random_scalar(g, rng);
    const auto z = fixtures::random_faces(g, rng);
    const auto du = gradient(u);
    const auto dz = divergence(z);
    // oracle: plain loops over cells and faces, boundary flux from the face list
    double cells = 0.0, faces = 0.0, flux = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      if (g.is_interior_cell(c)) cells += dz[c] * u[c] * g.cell_volume();
    }
    for (std::size_t f = 0; f < g.face_count(); ++f) faces += z[f] * du[f] * g.cell_volume();
    for (const auto& b : g.boundary_faces()) flux += b.normal * z[b.face] * u[b.outer_cell] * g.face_area();
    CHECK(std::abs(cells + faces - flux) <= 1e-12 * (1.0 + std::abs(cells) + std::abs(faces)));
  }
}

TEST_CASE("adjointness with a field vanishing on the collar") {
  std::mt19937_64 rng(4);
  const Grid g = fixtures::plane(6, 5, 0.2);
  auto w = fixtures::random_scalar(g, rng);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (!g.is_interior_cell(c)) w[c] = 0.0;
  }
  const auto z = fixtures::random_faces(g, rng);
  const double lhs = inner(w, divergence(z));
  const double rhs = -inner(z, gradient(w));
  CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
}

TEST_CASE("extend_with_boundary produces the trace jumps") {
  const Grid g = fixtures::line(1, 1.0);
  const ScalarField u0(g, std::vector<double>{1, 0, 5});
  const ScalarField u(g, std::vector<double>{0, 2, 0});
  const auto ext = extend_with_boundary(u, u0);
  const auto z = gradient(ext);
  CHECK(z[0] == 1.0);
  CHECK(z[1] == 3.0);

  const Grid p = fixtures::plane(3, 2, 1.0);
  const auto jumps = gradient(extend_with_boundary(ScalarField(p, 1.0), ScalarField(p, 0.0)));
  for (const auto& b : p.boundary_faces()) CHECK(std::abs(jumps[b.face]) == 1.0);
  const ScalarField same = fixtures::sample(p, [](double x, double y) { return x - y; });
  const auto none = gradient(extend_with_boundary(same, same));
  CHECK(none.values().size() == p.face_count());
}

TEST_CASE("groups cover every cell once and every face once") {
  const Grid g = fixtures::plane(5, 4, 1.0);
  std::set<std::size_t> cells, faces;
  for (const auto& seg : g.group_segments()) {
    for (std::size_t c = 0; c < seg.length; ++c) {
      CHECK(cells.insert(seg.first_cell + c).second);
      if (seg.x_face >= 0) CHECK(faces.insert(seg.x_face + c).second);
      if (seg.y_face >= 0) CHECK(faces.insert(seg.y_face + c).second);
    }
  }
  for (const auto& b : g.boundary_faces()) CHECK(faces.insert(b.face).second);
  CHECK(cells.size() == g.interior_count());
  CHECK(faces.size() == g.face_count());
}

TEST_CASE("sup_norm is the largest group norm") {
  const Grid g = fixtures::plane(2, 2, 1.0);
  FaceVectorField z(g);
  z[g.x_face(1, 0)] = 0.6;
  z[g.y_face(0, 1)] = 0.8;  // same group as x_face(1, 0): cell (0, 0)
  CHECK(sup_norm(z) == doctest::Approx(1.0));
  z[g.x_face(0, 1)] = -1.5;  // boundary face
  CHECK(sup_norm(z) == 1.5);
}

TEST_CASE("sample points clamp collar cells to the boundary") {
  const Grid g = fixtures::line(4, 0.25);
  CHECK(g.sample_point(-1)[0] == 0.0);
  CHECK(g.sample_point(4)[0] == 1.0);
  CHECK(g.sample_point(1)[0] == doctest::Approx(0.375));
  CHECK(g.cell_center(-1)[0] == doctest::Approx(-0.125));
}

TEST_CASE("mismatched grids are rejected") {
  const auto a = ScalarField(fixtures::line(4, 0.25));
  const auto b = ScalarField(fixtures::line(4, 0.5));
  CHECK_THROWS_AS(inner(a, b), GridMismatch);
  CHECK_NOTHROW(inner(a, ScalarField(fixtures::line(4, 0.25))));
}
