// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tvflow/anzellotti.hpp"
#include "tvflow/energy.hpp"

namespace tvflow {
namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sorted cut positions splitting [0, n) into `pieces` runs.
std::vector<int> random_cuts(std::mt19937_64& rng, int n, int pieces) {
  std::vector<int> cuts{0, n};
  std::uniform_int_distribution<int> pos(1, std::max(1, n - 1));
  for (int p = 1; p < pieces && n > 1; ++p) cuts.push_back(pos(rng));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

int piece_of(const std::vector<int>& cuts, int i) {
  return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), i) - cuts.begin()) - 1;
}

// Piecewise constant on a random tensor partition of Omega, levels in [-amplitude, amplitude].
std::vector<double> random_blocks(std::mt19937_64& rng, const Grid& g, double amplitude) {
  std::uniform_int_distribution<int> count(1, 6);
  const auto xc = random_cuts(rng, g.nx(), count(rng));
  const auto yc = g.dimension() == 2 ? random_cuts(rng, g.ny(), count(rng)) : std::vector<int>{0, 1};
  std::uniform_real_distribution<double> level(-amplitude, amplitude);
  std::vector<double> levels((xc.size() - 1) * (yc.size() - 1));
  for (double& l : levels) l = level(rng);
  std::vector<double> out(g.interior_count());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      out[g.interior_index(i, j)] = levels[piece_of(yc, j) * (xc.size() - 1) + piece_of(xc, i)];
    }
  }
  return out;
}

ScalarField time_derivative(const ScalarField& u, const ScalarField& u_prev, double tau) {
  require_same_grid(u.grid(), u_prev.grid());
  const Grid& g = u.grid();
  ScalarField dt(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) dt.at(i, j) = (u.at(i, j) - u_prev.at(i, j)) / tau;
  }
  return dt;
}

void require_collar(const ScalarField& v, const ScalarField& u0) {
  require_same_grid(v.grid(), u0.grid());
  const Grid& g = v.grid();
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (!g.is_interior_cell(c) && v[c] != u0[c]) {
      throw InvalidArgument("comparison field differs from the boundary datum on the collar");
    }
  }
}

}  // namespace

std::size_t FlowProblem::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / tau));
}

const ScalarField& FlowProblem::boundary_at(std::size_t k) const {
  if (boundary.size() == 1) return boundary.front();
  if (k >= boundary.size()) throw InvalidArgument("no boundary datum for time node " + std::to_string(k));
  return boundary[k];
}

void FlowProblem::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("time step tau must be positive");
  if (!(horizon >= tau) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be >= tau");
  if (boundary.empty()) throw InvalidArgument("flow problem needs boundary data");
  if (boundary.size() != 1 && boundary.size() != steps() + 1) {
    throw InvalidArgument("expected 1 or " + std::to_string(steps() + 1) + " boundary fields, got " +
                          std::to_string(boundary.size()));
  }
  for (const auto& b : boundary) require_same_grid(b.grid(), grid);
  require_same_grid(initial.grid(), grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!grid.is_interior_cell(c) && initial[c] != boundary.front()[c]) {
      throw InvalidArgument("initial datum does not match the boundary datum on the collar at t = 0");
    }
  }
}

bool FlowSolution::passed() const {
  return std::all_of(slices.begin(), slices.end(), [](const Slice& s) { return s.certificate.passed(); });
}

FlowStepError::FlowStepError(std::size_t time_index, const NonConvergence& cause)
    : NonConvergence(cause.iterations(), cause.last_gap(),
                     "time step " + std::to_string(time_index) + ": " + cause.what()),
      time_index_(time_index) {}

std::vector<ScalarField> comparison_family(const ScalarField& u, const ScalarField& u_prev,
                                           const ScalarField& u0_now, std::size_t random_count,
                                           std::uint64_t seed) {
  require_same_grid(u.grid(), u0_now.grid());
  const Grid& g = u.grid();
  std::vector<ScalarField> family;
  family.reserve(random_count + 3);
  family.push_back(extend_with_boundary(u, u0_now));
  family.push_back(extend_with_boundary(u_prev, u0_now));
  family.push_back(u0_now);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double amplitude = 1.0 + std::max(interior_sup(u), interior_sup(u0_now));
  const auto base = u.interior();
  for (std::size_t r = 0; r < random_count; ++r) {
    std::vector<double> v;
    if (r % 2 == 0) {
      const double delta = std::pow(10.0, -3.0 * unit(rng));
      v = random_blocks(rng, g, delta);
      for (std::size_t c = 0; c < v.size(); ++c) v[c] += base[c];
    } else {
      v = random_blocks(rng, g, amplitude);
    }
    family.push_back(extend_with_boundary(v, u0_now));
  }
  return family;
}

VariationalReport verify_variational(const ScalarField& u, const ScalarField& u_prev, double tau,
                                     std::span<const ScalarField> comparisons, const ScalarField& u0_now,
                                     double relative_tolerance) {
  const ScalarField dt = time_derivative(u, u_prev, tau);
  const double tv = total_variation(u, u0_now);
  VariationalReport r;
  r.tolerance = relative_tolerance * (1.0 + tv);
  r.count = comparisons.size();
  r.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < comparisons.size(); ++i) {
    const ScalarField& v = comparisons[i];
    require_collar(v, u0_now);
    const double rhs = inner(dt, v) - inner(dt, u) + total_variation(v, u0_now);
    const double violation = tv - rhs;
    if (violation > r.worst_violation) {
      r.worst_violation = violation;
      r.worst_index = i;
    }
  }
  if (comparisons.empty()) r.worst_violation = 0.0;
  r.passed = r.worst_violation <= r.tolerance;
  return r;
}

WeakReport verify_weak(const ScalarField& u, const FaceVectorField& z, const ScalarField& u_prev, double tau,
                       std::span<const ScalarField> comparisons, const ScalarField& u0_now,
                       double relative_tolerance) {
  require_same_grid(z.grid(), u.grid());
  const Grid& g = u.grid();
  const ScalarField dt = time_derivative(u, u_prev, tau);
  const double tv = total_variation(u, u0_now);
  WeakReport r;
  r.tolerance = relative_tolerance * (1.0 + tv);
  r.count = comparisons.size();

  r.z_linf = sup_norm(z);
  r.sup_norm_ok = r.z_linf <= 1.0 + r.tolerance;

  const ScalarField div = divergence(z);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      r.div_residual = std::max(r.div_residual, std::abs(div.at(i, j) - dt.at(i, j)));
    }
  }
  r.divergence_ok = r.div_residual <= r.tolerance;

  r.pairing_residual = std::abs(pairing(z, u, u0_now).value - tv);
  r.maximal_pairing_ok = r.pairing_residual <= r.tolerance;

  const double dt_u = inner(dt, u);
  for (const ScalarField& v : comparisons) {
    require_collar(v, u0_now);
    const double lhs = tv + dt_u - inner(dt, v);
    r.identity_residual = std::max(r.identity_residual, std::abs(pairing(z, v, u0_now).value - lhs));
  }
  r.identity_ok = r.identity_residual <= r.tolerance;
  return r;
}

SliceCertificate certify_slice(const ScalarField& u, const FaceVectorField& z, const ScalarField& u_prev,
                               const ScalarField& u0_now, double tau, const FlowConfig& cfg,
                               std::size_t time_index, bool check_dissipation) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("time step tau must be positive");
  require_same_grid(u.grid(), u_prev.grid());
  require_same_grid(u.grid(), u0_now.grid());
  require_same_grid(u.grid(), z.grid());
  const double tv_prev = total_variation(u_prev, u0_now);

  SliceCertificate c(u.grid());
  c.time_index = time_index;
  c.time = static_cast<double>(time_index) * tau;
  c.tv_value = total_variation(u, u0_now);
  c.dt_field = time_derivative(u, u_prev, tau);
  c.z_linf = sup_norm(z);
  c.l2_step = l2_distance(u, u_prev);

  const auto family = comparison_family(u, u_prev, u0_now, cfg.comparisons, mix_seed(cfg.seed, time_index));
  c.variational = verify_variational(u, u_prev, tau, family, u0_now, cfg.verify_tolerance);
  c.weak = verify_weak(u, z, u_prev, tau, family, u0_now, cfg.verify_tolerance);
  c.variational_violation = c.variational.worst_violation;
  c.maximal_pairing_residual = c.weak.pairing_residual;
  c.div_residual = c.weak.div_residual;

  // z itself is a witness once its divergence is made exact; fall back to the solver otherwise.
  SolverConfig fc = cfg.solver;
  fc.tolerance = 1e-9;
  const FaceVectorField zp = project_onto_divergence(z, c.dt_field);
  const double zp_norm = sup_norm(zp);
  if (zp_norm <= 1.0 + fc.tolerance) {
    c.dual_norm = zp_norm;
    c.w_minus_one_inf_feasible = true;
  } else {
    const FeasibilityResult fr = dual_feasibility(c.dt_field, fc);
    c.dual_norm = fr.optimum;
    c.w_minus_one_inf_feasible = fr.feasible;
  }

  c.dissipation_excess = c.tv_value + c.l2_step * c.l2_step / tau - tv_prev;
  c.dissipation_ok = !check_dissipation || c.dissipation_excess <= cfg.dissipation_tolerance * (1.0 + tv_prev);
  return c;
}

Slice step(const ScalarField& u_prev, const ScalarField& u0_now, double tau, const FlowConfig& cfg,
           std::size_t time_index, const FaceVectorField* warm_z, bool check_dissipation) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("time step tau must be positive");
  require_same_grid(u_prev.grid(), u0_now.grid());
  const Grid& g = u_prev.grid();

  // Completing the square: TV(v) + 1/(2 tau) |v - u_prev|^2 = psi(v) with lambda = 1/tau,
  // f = -u_prev / tau, up to the constant (1/2tau) sum (u_prev^2 - 2 u0 u_prev).
  ScalarField f(g);
  double offset = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double p = u_prev.at(i, j);
      f.at(i, j) = -p / tau;
      offset += p * p - 2.0 * u0_now.at(i, j) * p;
    }
  }
  offset *= 0.5 * g.cell_volume() / tau;
  const double tv_prev = total_variation(u_prev, u0_now);

  // The gap target is meant relative to the TV scale, not to the completed-square constant.
  SolverConfig sc = cfg.solver;
  sc.tolerance = cfg.solver.tolerance * (1.0 + tv_prev) / (1.0 + tv_prev + std::abs(offset));
  const EnergyParams params{0.0, 1.0 / tau, f, u0_now};
  const WarmStart warm{&u_prev, warm_z};
  EllipticSolution sol = solve_psi(params, sc, warm);

  Slice s{std::move(sol.u), std::move(sol.z), SliceCertificate(g)};
  s.certificate = certify_slice(s.u, s.z, u_prev, u0_now, tau, cfg, time_index, check_dissipation);
  s.certificate.solver = sol.certificate;
  return s;
}

FlowSolution solve_flow(const FlowProblem& problem, const FlowConfig& cfg) {
  problem.validate();
  const Grid& g = problem.grid;
  FlowSolution out;
  out.tau = problem.tau;
  const std::size_t steps = problem.steps();
  out.slices.reserve(steps + 1);

  Slice first{problem.initial, FaceVectorField(g), SliceCertificate(g)};
  first.certificate.tv_value = total_variation(problem.initial, problem.boundary_at(0));
  out.slices.push_back(std::move(first));
  out.tv_series.push_back(out.slices.back().certificate.tv_value);
  out.l2_steps.push_back(0.0);

  for (std::size_t k = 1; k <= steps; ++k) {
    const Slice& prev = out.slices.back();
    try {
      Slice next = step(prev.u, problem.boundary_at(k), problem.tau, cfg, k, &prev.z, problem.time_independent());
      out.tv_series.push_back(next.certificate.tv_value);
      out.l2_steps.push_back(next.certificate.l2_step);
      out.slices.push_back(std::move(next));
    } catch (const NonConvergence& e) {
      throw FlowStepError(k, e);
    }
  }
  return out;
}

IntegratedReport verify_variational_integrated(const FlowSolution& flow, const FlowProblem& problem,
                                               std::size_t random_count, std::uint64_t seed,
                                               double relative_tolerance) {
  const std::size_t steps = flow.slices.size() - 1;
  const double tau = flow.tau;
  const Grid& g = problem.grid;
  IntegratedReport r;

  double lhs = 0.0;
  double tv_scale = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    lhs += tau * flow.slices[k].certificate.tv_value;
    tv_scale += tau * (1.0 + flow.slices[k].certificate.tv_value);
  }
  r.tolerance = relative_tolerance * (1.0 + tv_scale);

  const auto evaluate = [&](auto&& make_v) {
    double rhs = 0.0;
    ScalarField v_prev = make_v(0);
    const ScalarField v0 = v_prev;
    ScalarField v_last = v_prev;
    for (std::size_t k = 1; k <= steps; ++k) {
      ScalarField v = make_v(k);
      const ScalarField& u = flow.slices[k].u;
      ScalarField dv(g);
      ScalarField e(g);
      for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
          dv.at(i, j) = v.at(i, j) - v_prev.at(i, j);
          e.at(i, j) = v.at(i, j) - u.at(i, j);
        }
      }
      rhs += inner(dv, e) + tau * total_variation(v, problem.boundary_at(k));
      v_prev = v;
      v_last = std::move(v);
    }
    const double e_end = l2_distance(v_last, flow.slices[steps].u);
    const double e_start = l2_distance(v0, flow.slices[0].u);
    rhs += -0.5 * e_end * e_end + 0.5 * e_start * e_start;
    r.worst_violation = std::max(r.worst_violation, lhs - rhs);
    ++r.count;
  };

  r.worst_violation = -std::numeric_limits<double>::infinity();
  evaluate([&](std::size_t k) { return problem.boundary_at(k); });
  evaluate([&](std::size_t k) {
    return k == 0 ? flow.slices[0].u : extend_with_boundary(flow.slices[k - 1].u, problem.boundary_at(k));
  });
  std::mt19937_64 rng(mix_seed(seed, 0xfeed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double amplitude = 1.0;
  for (const auto& s : flow.slices) amplitude = std::max(amplitude, interior_sup(s.u));
  for (std::size_t n = 0; n < random_count; ++n) {
    const double delta = n % 2 == 0 ? std::pow(10.0, -3.0 * unit(rng)) : amplitude;
    const auto phi = random_blocks(rng, g, delta);
    evaluate([&](std::size_t k) {
      auto base = flow.slices[k].u.interior();
      for (std::size_t c = 0; c < base.size(); ++c) base[c] += phi[c];
      return extend_with_boundary(base, problem.boundary_at(k));
    });
  }
  r.passed = r.worst_violation <= r.tolerance;
  return r;
}

InitialAttainmentReport check_initial_attainment(const FlowSolution& flow, const FlowProblem& problem,
                                                 std::size_t slices) {
  InitialAttainmentReport r;
  if (flow.slices.empty()) return r;
  const ScalarField& u_start = flow.slices[0].u;
  const std::size_t count = std::min(slices + 1, flow.slices.size());
  for (std::size_t k = 0; k < count; ++k) r.distances.push_back(l2_distance(flow.slices[k].u, u_start));
  if (flow.slices.size() > 1) {
    const ScalarField& u0_1 = problem.boundary_at(1);
    const double drop = total_variation(u_start, u0_1) - flow.slices[1].certificate.tv_value;
    r.first_step_bound = std::sqrt(std::max(0.0, flow.tau * drop));
    r.within_bound = r.distances[1] <= r.first_step_bound + 1e-8 * (1.0 + r.first_step_bound);
  }
  return r;
}

RefinementReport initial_attainment_refinement(const FlowProblem& problem, const FlowConfig& cfg,
                                               std::size_t levels) {
  problem.validate();
  RefinementReport r;
  const ScalarField& u0 = problem.boundary_at(problem.time_independent() ? 0 : 1);
  double tau = problem.tau;
  for (std::size_t l = 0; l < levels; ++l, tau *= 0.5) {
    const Slice s = step(problem.initial, u0, tau, cfg, 1, nullptr, problem.time_independent());
    r.taus.push_back(tau);
    r.first_distances.push_back(l2_distance(s.u, problem.initial));
    if (l > 0 && !(r.first_distances[l] < r.first_distances[l - 1] || r.first_distances[l] == 0.0)) {
      r.decreasing = false;
    }
  }
  return r;
}

}  // namespace tvflow
