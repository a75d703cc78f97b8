// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "tvflow/grid.hpp"

// Discrete Anzellotti pairing for Dirichlet data and the outer normal trace.
//
// For z on the faces and v on Omega (extended by u0), the pairing over the
// closure of Omega is
//
//   (z, Dv)_u0 = -sum_Omega div z * v h^d + sum_boundary [z, nu] u0 h^(d-1)
//
// and coincides with sum_faces z . grad(v extended by u0) h^d by the exact
// Gauss-Green formula of the staggered operators.

namespace tvflow {

struct PairingValue {
  double value = 0.0;
  double via_definition = 0.0;
  double via_identity = 0.0;
};

/// Outward normal component of z on each boundary face, in Grid::boundary_faces() order.
std::vector<double> normal_trace(const FaceVectorField& z);

/// The three terms of sum_Omega w div z h^d + sum_faces z . grad w h^d = sum_boundary [z,nu] w h^(d-1),
/// w read on Omega and on the collar.
struct GaussGreenTerms {
  double volume = 0.0;    // sum_Omega w div z h^d
  double gradient = 0.0;  // sum_faces z . grad w h^d
  double boundary = 0.0;  // sum_boundary [z, nu] w_outer h^(d-1)

  double residual() const { return volume + gradient - boundary; }
  double scale() const;
};
GaussGreenTerms gauss_green(const FaceVectorField& z, const ScalarField& w);

/// (z, Dv)_u0(closure of Omega), computed from the definition and from the
/// comparison identity sum z . grad u0 + sum div z (u0 - v).
PairingValue pairing(const FaceVectorField& z, const ScalarField& v, const ScalarField& u0);

struct PairingBound {
  double lhs = 0.0;  // |(z, Du)_u0|
  double rhs = 0.0;  // A_mu(u) - mu sum sqrt(1 - |z|^2) h^d
};

/// Requires sup_norm(z) <= 1 + 1e-12 and mu in (0, 1]; throws InvalidArgument otherwise.
PairingBound fenchel_pairing_bound(const FaceVectorField& z, const ScalarField& u,
                                   const ScalarField& u0, double mu);

}  // namespace tvflow
