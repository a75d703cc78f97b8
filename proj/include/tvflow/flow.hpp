// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tvflow/elliptic.hpp"
#include "tvflow/error.hpp"
#include "tvflow/grid.hpp"

// Implicit Euler for the total variation flow with Dirichlet data,
//
//   u^k = argmin_v ||Dv||(closure of Omega) + 1/(2 tau) sum (v - u^{k-1})^2 h^d,  v = u0(t_k) on the collar,
//
// and slicewise verification of the two solution notions: the variational
// inequality against a comparison family, and the weak form through a dual
// field z with |z| <= 1, div z = d_t u and (z, Du) = ||Du||.

namespace tvflow {

struct FlowProblem {
  Grid grid;
  /// Boundary datum per time node 0..K, or a single field for time-independent data.
  std::vector<ScalarField> boundary;
  /// u(0) on Omega; its collar must equal boundary_at(0) on the collar.
  ScalarField initial;
  double tau = 0.0;
  double horizon = 0.0;

  /// K = round(T / tau).
  std::size_t steps() const;
  const ScalarField& boundary_at(std::size_t k) const;
  bool time_independent() const { return boundary.size() == 1; }
  /// Throws InvalidArgument.
  void validate() const;
};

struct FlowConfig {
  /// Gap target 1e-10: the dissipation check below is tighter than the solver default.
  SolverConfig solver = [] {
    SolverConfig c;
    c.tolerance = 1e-10;
    return c;
  }();
  /// Relative tolerance of the slice verifiers: absolute = verify_tolerance (1 + ||Du||).
  double verify_tolerance = 1e-6;
  /// Relative slack of the energy-dissipation check.
  double dissipation_tolerance = 1e-8;
  std::size_t comparisons = 100;
  std::uint64_t seed = 0;
};

struct VariationalReport {
  /// max over v of ||Du|| - (sum d_t u (v - u) h^d + ||Dv||); <= tolerance to pass.
  double worst_violation = 0.0;
  std::size_t worst_index = 0;
  std::size_t count = 0;
  double tolerance = 0.0;
  bool passed = true;
};

struct WeakReport {
  double z_linf = 0.0;
  double div_residual = 0.0;
  double pairing_residual = 0.0;   // |(z, Du)_u0 - ||Du|||
  double identity_residual = 0.0;  // worst |(z, Dv)_u0 - ||Du|| - sum d_t u (u - v) h^d|
  std::size_t count = 0;
  double tolerance = 0.0;
  bool sup_norm_ok = true;
  bool divergence_ok = true;
  bool maximal_pairing_ok = true;
  bool identity_ok = true;

  bool passed() const { return sup_norm_ok && divergence_ok && maximal_pairing_ok && identity_ok; }
};

struct SliceCertificate {
  explicit SliceCertificate(const Grid& grid) : dt_field(grid) {}

  std::size_t time_index = 0;
  double time = 0.0;
  double tv_value = 0.0;
  ScalarField dt_field;
  double maximal_pairing_residual = 0.0;
  double div_residual = 0.0;
  double z_linf = 0.0;
  double variational_violation = 0.0;
  bool w_minus_one_inf_feasible = true;
  double dual_norm = 0.0;  // certified upper bound on ||d_t u||_{-1,inf}
  double l2_step = 0.0;    // ||u^k - u^{k-1}||
  /// ||Du^k|| + ||u^k - u^{k-1}||^2 / tau - ||Du^{k-1}||, both TVs with the current boundary datum.
  double dissipation_excess = 0.0;
  bool dissipation_ok = true;
  VariationalReport variational;
  WeakReport weak;
  DualityCertificate solver;

  bool passed() const {
    return variational.passed && weak.passed() && w_minus_one_inf_feasible && dissipation_ok;
  }
};

struct Slice {
  ScalarField u;
  FaceVectorField z;
  SliceCertificate certificate;
};

struct FlowSolution {
  double tau = 0.0;
  std::vector<Slice> slices;
  std::vector<double> tv_series;
  std::vector<double> l2_steps;  // l2_steps[0] = 0

  bool passed() const;
};

/// Raised by solve_flow when a time step fails; carries the index.
class FlowStepError : public NonConvergence {
 public:
  FlowStepError(std::size_t time_index, const NonConvergence& cause);
  std::size_t time_index() const noexcept { return time_index_; }

 private:
  std::size_t time_index_;
};

/// Comparison family for one slice: u itself, u_prev (collar replaced by
/// u0_now), u0_now, and `random_count` seeded piecewise-constant fields
/// (half perturbations of u, half free), all equal to u0_now on the collar.
std::vector<ScalarField> comparison_family(const ScalarField& u, const ScalarField& u_prev,
                                           const ScalarField& u0_now, std::size_t random_count,
                                           std::uint64_t seed);

/// Everything in a slice certificate except the solver record: verifiers,
/// W^{-1,inf} feasibility of d_t u and the dissipation check.
SliceCertificate certify_slice(const ScalarField& u, const FaceVectorField& z, const ScalarField& u_prev,
                               const ScalarField& u0_now, double tau, const FlowConfig& cfg,
                               std::size_t time_index, bool check_dissipation = true);

/// One implicit step from u_prev with boundary datum u0_now, certified and verified.
Slice step(const ScalarField& u_prev, const ScalarField& u0_now, double tau, const FlowConfig& cfg,
           std::size_t time_index = 1, const FaceVectorField* warm_z = nullptr,
           bool check_dissipation = true);

FlowSolution solve_flow(const FlowProblem& problem, const FlowConfig& cfg);

/// Throws InvalidArgument if a comparison differs from u0_now on the collar.
VariationalReport verify_variational(const ScalarField& u, const ScalarField& u_prev, double tau,
                                     std::span<const ScalarField> comparisons, const ScalarField& u0_now,
                                     double relative_tolerance);

WeakReport verify_weak(const ScalarField& u, const FaceVectorField& z, const ScalarField& u_prev,
                       double tau, std::span<const ScalarField> comparisons, const ScalarField& u0_now,
                       double relative_tolerance);

/// Time-integrated variational inequality over a whole trajectory,
///   tau sum_k ||Du^k|| <= sum_k <v^k - v^{k-1}, v^k - u^k> + tau sum_k ||Dv^k||
///                          - 1/2 ||v^K - u^K||^2 + 1/2 ||v^0 - u^0||^2,
/// tested for comparison trajectories v built from the boundary data and
/// seeded time-constant piecewise-constant perturbations of u.
struct IntegratedReport {
  double worst_violation = 0.0;
  std::size_t count = 0;
  double tolerance = 0.0;
  bool passed = true;
};
IntegratedReport verify_variational_integrated(const FlowSolution& flow, const FlowProblem& problem,
                                               std::size_t random_count, std::uint64_t seed,
                                               double relative_tolerance);

struct InitialAttainmentReport {
  std::vector<double> distances;  // ||u^k - u^0|| for the first slices
  double first_step_bound = 0.0;  // sqrt(tau (||Du^0|| - ||Du^1||))
  bool within_bound = true;
};
InitialAttainmentReport check_initial_attainment(const FlowSolution& flow, const FlowProblem& problem,
                                                 std::size_t slices = 5);

struct RefinementReport {
  std::vector<double> taus;
  std::vector<double> first_distances;  // ||u(tau_k) - u^0|| at the first slice
  bool decreasing = true;
};
/// Reruns the first steps at tau, tau/2, ... and checks the first-slice distance shrinks.
RefinementReport initial_attainment_refinement(const FlowProblem& problem, const FlowConfig& cfg,
                                               std::size_t levels = 3);

}  // namespace tvflow
