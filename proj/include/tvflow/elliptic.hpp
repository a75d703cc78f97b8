// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tvflow/energy.hpp"
#include "tvflow/grid.hpp"

// Minimization of psi (area or TV objective with Dirichlet data) by a
// first-order primal-dual splitting on
//
//   min_u max_{|z_c| <= 1} <z, grad u_ext> + mu sum sqrt(1 - |z_c|^2) + sum (lambda/2 u^2 + f (u - u0)),
//
// and the duality certificates that come with it. The dual objective is
//
//   D(z) = <z, grad u0> + mu sum sqrt(1 - |z_c|^2)
//          + sum ((div z - f) u0 - (div z - f)^2 / (2 lambda))     (lambda > 0)
//   D(z) = <z, grad u0> + mu sum sqrt(1 - |z_c|^2),  div z = f      (lambda = 0)
//
// so primal - D(z) >= 0 for every admissible z (weak duality) and the gap
// closes at the saddle point.

namespace tvflow {

struct SolverConfig {
  std::size_t max_iterations = 400000;
  /// Relative primal-dual gap target; also scales the divergence residual target.
  double tolerance = 1e-8;
  /// Step sizes; 0 selects them from the operator norm bound 4d/h^2.
  double primal_step = 0.0;
  double dual_step = 0.0;
  /// Tolerance of the per-cell root find in the dual proximal map.
  double newton_tolerance = 1e-14;
  /// Iterations between certificate evaluations.
  std::size_t check_interval = 20;
  /// Step-size acceleration from the lambda-strong convexity of the primal term.
  bool accelerate = true;
  /// Accelerated steps restart once sigma has grown by this factor; the dual
  /// otherwise lags far behind the primal for large lambda. 0 disables.
  double restart_factor = 1e4;
  /// Residual balancing of the primal and dual step sizes (ignored when accelerating).
  bool adaptive = true;

  /// Throws InvalidArgument when tolerance <= 0 or the step product exceeds
  /// the stability bound h^2 / (4d) on the given grid.
  void validate(const Grid& grid) const;
};

struct DualityCertificate {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  /// <z, grad u0> + lambda/2 sum u0^2 + mu sum sqrt(1 - |z|^2): the upper
  /// estimate for the minimum that holds when div z = lambda u + f.
  double estimate_value = 0.0;
  /// ||div z - lambda u - f||_inf over Omega.
  double div_residual = 0.0;
  double feasibility_excess = 0.0;
  double z_linf = 0.0;
  std::size_t iterations = 0;

  double relative_gap() const;
};

struct EllipticSolution {
  ScalarField u;
  FaceVectorField z;
  DualityCertificate certificate;
};

/// Evaluates the certificate of a candidate pair (u, z).
DualityCertificate certify(const ScalarField& u, const FaceVectorField& z,
                           const EnergyParams& params, std::size_t iterations = 0);

/// Divergence residual scale 1 + ||f||_inf + lambda ||u||_inf.
double divergence_scale(const ScalarField& u, const EnergyParams& params);

struct WarmStart {
  const ScalarField* u = nullptr;
  const FaceVectorField* z = nullptr;
};

/// Minimizes psi for mu >= 0, lambda >= 0. Throws NonConvergence or UnboundedBelow.
EllipticSolution solve_psi(const EnergyParams& params, const SolverConfig& cfg,
                           const WarmStart& warm = {});

/// psi with mu > 0: the regularized area problem.
EllipticSolution solve_area_problem(const EnergyParams& params, const SolverConfig& cfg);

/// min TV(v) + sum f (v - u0) over v = u0 on the collar, with z in S_f (div z = f, |z| <= 1).
EllipticSolution solve_tv_problem(const ScalarField& f, const ScalarField& u0,
                                  const SolverConfig& cfg);

/// z + grad phi with phi = 0 on the collar and div(z + grad phi) = target on Omega.
FaceVectorField project_onto_divergence(const FaceVectorField& z, const ScalarField& target);

// ---------------------------------------------------------------------------
// Dual-norm feasibility: min ||z||_inf subject to div z = g.

enum class FeasibilityMethod { automatic, exact_1d, primal_dual };

struct FeasibilityResult {
  bool feasible = false;
  /// Best certified upper bound on min ||z||_inf (attained by the witness).
  double optimum = 0.0;
  /// Certified lower bound on min ||z||_inf.
  double lower_bound = 0.0;
  /// optimum - 1 (positive when infeasible).
  double margin = 0.0;
  std::optional<FaceVectorField> witness;
  std::size_t iterations = 0;
};

/// Feasible iff the minimum is <= 1 + cfg.tolerance. In 1D the minimum is
/// computed in closed form; in 2D a primal-dual scheme brackets it.
FeasibilityResult dual_feasibility(const ScalarField& g, const SolverConfig& cfg,
                                   FeasibilityMethod method = FeasibilityMethod::automatic);

// ---------------------------------------------------------------------------
// mu-sweep: psi_mu with lambda = mu and f_mu = (1 - mu) f, compared against the TV problem.

struct SweepEntry {
  double mu = 0.0;
  double value = 0.0;       // psi_mu(u_mu)
  double dual_value = 0.0;  // <z_mu, grad u0>
  double tv_value = 0.0;    // ||Du_mu||
  double div_residual = 0.0;
  double sqrt_mu_u_l2 = 0.0;
  double value_deviation = 0.0;  // |value - value_0|
  double value_bound = 0.0;      // mu |Omega| + mu/2 sum u0^2 h^d
  DualityCertificate certificate;
  ScalarField u;
  FaceVectorField z;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  EllipticSolution limit;
  /// sqrt(2 B) with B = A_1(u0) + sum u0^2 h^d + TV(u0): bound on sqrt(mu) ||u_mu||.
  double coercive_bound = 0.0;
  bool values_within_bounds = false;
  bool dual_trend_monotone = false;
  bool envelope_holds = false;
  bool coercive_bound_holds = false;
};

/// schedule must be strictly decreasing with entries in (0, 1).
SweepReport mu_sweep(const ScalarField& f, const ScalarField& u0, const std::vector<double>& schedule,
                     const SolverConfig& cfg);

}  // namespace tvflow
