// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "tvflow/grid.hpp"

// Total variation and area functionals with Dirichlet data on the collar,
// their pointwise Fenchel machinery, and the composite objective
//
//   psi(u) = A_mu(u) + sum_Omega (lambda/2 u^2 + f (u - u0)) h^d.
//
// A_mu(u) = sum_cells sqrt(mu^2 + |g_c|^2) h^d + sum_boundary_faces |g_f| h^d,
// where g is the gradient of u extended by u0, g_c the cell's group of
// forward interior faces and g_f a boundary face. The boundary jump enters
// unregularized. A_0 is the total variation over the closure of Omega.

namespace tvflow {

struct EnergyParams {
  double mu = 0.0;
  double lambda = 0.0;
  ScalarField f;   // source; only Omega values are used
  ScalarField u0;  // Dirichlet datum on the collar, offset in f (u - u0) on Omega
};

/// ||Du||(closure of Omega) for u extended by u0. Only Omega values of u are read.
double total_variation(const ScalarField& u, const ScalarField& u0);

/// A_mu(u). Throws InvalidArgument for mu < 0.
double area_functional(const ScalarField& u, const ScalarField& u0, double mu);

/// psi(u) for the given parameters.
double psi(const ScalarField& u, const EnergyParams& params);

/// sqrt(mu^2 + |v|^2) - mu sqrt(1 - |z|^2) - |z . v|, nonnegative for |z| <= 1
/// and zero iff z = v / sqrt(mu^2 + |v|^2). Requires mu > 0 and |z| <= 1 + 1e-12.
double fenchel_gap(std::span<const double> z, std::span<const double> v, double mu);

/// -mu sqrt(1 - |z|^2), the convex conjugate of sqrt(mu^2 + |.|^2). Requires |z| <= 1 + 1e-12.
double conjugate_density(std::span<const double> z, double mu);

// Gradient-level building blocks shared with the solvers.

/// sum_cells |g_c| h^d + sum_boundary |g_f| h^d.
double tv_of_gradient(const FaceVectorField& g);
/// sum_cells sqrt(mu^2 + |g_c|^2) h^d + sum_boundary |g_f| h^d.
double area_of_gradient(const FaceVectorField& g, double mu);
/// mu * sum_cells sqrt(1 - |z_c|^2) h^d (group norms above 1 count as 1).
double conjugate_mass(const FaceVectorField& z, double mu);

}  // namespace tvflow
