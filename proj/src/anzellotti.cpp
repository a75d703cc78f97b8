// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/anzellotti.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvflow/energy.hpp"
#include "tvflow/error.hpp"

namespace tvflow {

std::vector<double> normal_trace(const FaceVectorField& z) {
  const auto& faces = z.grid().boundary_faces();
  std::vector<double> trace;
  trace.reserve(faces.size());
  for (const auto& b : faces) trace.push_back(b.normal * z[b.face]);
  return trace;
}

double GaussGreenTerms::scale() const {
  return std::max({1.0, std::abs(volume), std::abs(gradient), std::abs(boundary)});
}

namespace {

double boundary_flux(const FaceVectorField& z, const ScalarField& w) {
  const Grid& g = z.grid();
  double s = 0.0;
  for (const auto& b : g.boundary_faces()) s += b.normal * z[b.face] * w[b.outer_cell];
  return s * g.face_area();
}

}  // namespace

GaussGreenTerms gauss_green(const FaceVectorField& z, const ScalarField& w) {
  require_same_grid(z.grid(), w.grid());
  GaussGreenTerms t;
  t.volume = inner(divergence(z), w);
  t.gradient = inner(z, gradient(w));
  t.boundary = boundary_flux(z, w);
  return t;
}

PairingValue pairing(const FaceVectorField& z, const ScalarField& v, const ScalarField& u0) {
  require_same_grid(z.grid(), v.grid());
  require_same_grid(z.grid(), u0.grid());
  const ScalarField div = divergence(z);
  PairingValue p;
  p.via_definition = -inner(div, v) + boundary_flux(z, u0);

  ScalarField offset = u0;
  const Grid& g = z.grid();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) offset.at(i, j) = u0.at(i, j) - v.at(i, j);
  }
  p.via_identity = inner(z, gradient(u0)) + inner(div, offset);
  p.value = p.via_definition;
  return p;
}

PairingBound fenchel_pairing_bound(const FaceVectorField& z, const ScalarField& u,
                                   const ScalarField& u0, double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) throw InvalidArgument("fenchel_pairing_bound requires mu in (0, 1]");
  const double zn = sup_norm(z);
  if (zn > 1.0 + 1e-12) {
    throw InvalidArgument("fenchel_pairing_bound requires ||z||_inf <= 1, got " + std::to_string(zn));
  }
  PairingBound b;
  b.lhs = std::abs(pairing(z, u, u0).value);
  b.rhs = area_functional(u, u0, mu) - conjugate_mass(z, mu);
  return b;
}

}  // namespace tvflow
