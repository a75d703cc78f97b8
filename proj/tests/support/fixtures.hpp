// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "tvflow/grid.hpp"

namespace fixtures {

inline tvflow::Grid line(int n, double h, double origin = 0.0, int collar = 1) {
  tvflow::GridSpec s;
  s.dimension = 1;
  s.shape = {n, 1};
  s.spacing = h;
  s.collar_width = collar;
  s.origin = {origin, 0.0};
  return tvflow::build_grid(s);
}

inline tvflow::Grid plane(int nx, int ny, double h, int collar = 1) {
  tvflow::GridSpec s;
  s.dimension = 2;
  s.shape = {nx, ny};
  s.spacing = h;
  s.collar_width = collar;
  return tvflow::build_grid(s);
}

/// Field from a function of the padded (i, j) indices.
inline tvflow::ScalarField tabulate(const tvflow::Grid& g, const std::function<double(int, int)>& fn) {
  tvflow::ScalarField u(g);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const auto ij = g.cell_coords(c);
    u[c] = fn(ij[0], ij[1]);
  }
  return u;
}

/// Field sampled at the clamped sample points.
inline tvflow::ScalarField sample(const tvflow::Grid& g, const std::function<double(double, double)>& fn) {
  return tabulate(g, [&](int i, int j) {
    const auto p = g.sample_point(i, j);
    return fn(p[0], p[1]);
  });
}

inline tvflow::ScalarField random_scalar(const tvflow::Grid& g, std::mt19937_64& rng, double a = 1.0) {
  std::uniform_real_distribution<double> d(-a, a);
  tvflow::ScalarField u(g);
  for (double& v : u.values()) v = d(rng);
  return u;
}

inline tvflow::FaceVectorField random_faces(const tvflow::Grid& g, std::mt19937_64& rng, double a = 1.0) {
  std::uniform_real_distribution<double> d(-a, a);
  tvflow::FaceVectorField z(g);
  for (double& v : z.values()) v = d(rng);
  return z;
}

/// Random z scaled into the unit ball per group.
inline tvflow::FaceVectorField random_feasible(const tvflow::Grid& g, std::mt19937_64& rng) {
  tvflow::FaceVectorField z = random_faces(g, rng);
  const double s = tvflow::sup_norm(z);
  if (s > 1.0) {
    for (double& v : z.values()) v /= s;
  }
  return z;
}

}  // namespace fixtures
