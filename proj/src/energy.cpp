// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvflow/error.hpp"
#include "tvflow/kernels.hpp"

namespace tvflow {
namespace {

constexpr double kBallSlack = 1e-12;

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double boundary_jump(const FaceVectorField& g) {
  double s = 0.0;
  for (const auto& b : g.grid().boundary_faces()) s += std::abs(g[b.face]);
  return s * g.grid().cell_volume();
}

void require_ball(double z2) {
  if (z2 > (1.0 + kBallSlack) * (1.0 + kBallSlack)) {
    throw InvalidArgument("dual vector outside the unit ball (|z| = " + std::to_string(std::sqrt(z2)) + ")");
  }
}

}  // namespace

double tv_of_gradient(const FaceVectorField& g) {
  const auto& k = kernels::active();
  double s = 0.0;
  for (const auto& seg : g.grid().group_segments()) {
    if (seg.x_face >= 0 && seg.y_face >= 0) {
      s += k.sum_hypot(g.data() + seg.x_face, g.data() + seg.y_face, seg.length);
    } else if (seg.x_face >= 0) {
      s += k.sum_abs(g.data() + seg.x_face, seg.length);
    } else if (seg.y_face >= 0) {
      s += k.sum_abs(g.data() + seg.y_face, seg.length);
    }
  }
  return s * g.grid().cell_volume() + boundary_jump(g);
}

double area_of_gradient(const FaceVectorField& g, double mu) {
  if (mu < 0.0) throw InvalidArgument("area functional requires mu >= 0");
  if (mu == 0.0) return tv_of_gradient(g);
  const auto& k = kernels::active();
  double s = 0.0;
  for (const auto& seg : g.grid().group_segments()) {
    if (seg.x_face >= 0 || seg.y_face >= 0) {
      const double* first = g.data() + (seg.x_face >= 0 ? seg.x_face : seg.y_face);
      const double* second = seg.x_face >= 0 && seg.y_face >= 0 ? g.data() + seg.y_face : nullptr;
      s += k.sum_area(first, second, seg.length, mu);
    } else {
      s += mu * static_cast<double>(seg.length);
    }
  }
  return s * g.grid().cell_volume() + boundary_jump(g);
}

double conjugate_mass(const FaceVectorField& z, double mu) {
  if (mu == 0.0) return 0.0;
  double s = 0.0;
  for (double n : cell_group_norms(z)) s += std::sqrt(std::max(0.0, 1.0 - n * n));
  return mu * s * z.grid().cell_volume();
}

double total_variation(const ScalarField& u, const ScalarField& u0) {
  return tv_of_gradient(gradient(extend_with_boundary(u, u0)));
}

double area_functional(const ScalarField& u, const ScalarField& u0, double mu) {
  if (mu < 0.0) throw InvalidArgument("area functional requires mu >= 0");
  return area_of_gradient(gradient(extend_with_boundary(u, u0)), mu);
}

double psi(const ScalarField& u, const EnergyParams& params) {
  require_same_grid(u.grid(), params.f.grid());
  require_same_grid(u.grid(), params.u0.grid());
  const Grid& g = u.grid();
  double lower = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double v = u.at(i, j);
      lower += 0.5 * params.lambda * v * v + params.f.at(i, j) * (v - params.u0.at(i, j));
    }
  }
  return area_functional(u, params.u0, params.mu) + lower * g.cell_volume();
}

double fenchel_gap(std::span<const double> z, std::span<const double> v, double mu) {
  if (z.size() != v.size()) throw InvalidArgument("fenchel_gap: z and v differ in length");
  if (!(mu > 0.0)) throw InvalidArgument("fenchel_gap requires mu > 0");
  const double z2 = squared_norm(z);
  require_ball(z2);
  double zv = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) zv += z[i] * v[i];
  return std::sqrt(mu * mu + squared_norm(v)) - mu * std::sqrt(std::max(0.0, 1.0 - z2)) - std::abs(zv);
}

double conjugate_density(std::span<const double> z, double mu) {
  if (mu < 0.0) throw InvalidArgument("conjugate_density requires mu >= 0");
  const double z2 = squared_norm(z);
  require_ball(z2);
  return -mu * std::sqrt(std::max(0.0, 1.0 - z2));
}

}  // namespace tvflow
