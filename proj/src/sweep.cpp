// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <future>
#include <vector>

#include "tvflow/elliptic.hpp"
#include "tvflow/energy.hpp"
#include "tvflow/error.hpp"

namespace tvflow {
namespace {

SweepEntry solve_entry(double mu, const ScalarField& f, const ScalarField& u0, const SolverConfig& cfg) {
  ScalarField f_mu = f;
  for (double& v : f_mu.values()) v *= 1.0 - mu;
  const EnergyParams params{mu, mu, f_mu, u0};
  EllipticSolution s = solve_psi(params, cfg);
  SweepEntry e{.mu = mu, .certificate = s.certificate, .u = s.u, .z = s.z};
  e.value = s.certificate.primal_value;
  e.dual_value = inner(s.z, gradient(u0));
  e.tv_value = total_variation(s.u, u0);
  e.div_residual = s.certificate.div_residual;
  e.sqrt_mu_u_l2 = std::sqrt(mu) * l2_norm(s.u);
  return e;
}

}  // namespace

SweepReport mu_sweep(const ScalarField& f, const ScalarField& u0, const std::vector<double>& schedule,
                     const SolverConfig& cfg) {
  require_same_grid(f.grid(), u0.grid());
  if (schedule.empty()) throw InvalidArgument("mu schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0 && schedule[i] < 1.0)) throw InvalidArgument("mu schedule entries must lie in (0, 1)");
    if (i > 0 && !(schedule[i] < schedule[i - 1])) throw InvalidArgument("mu schedule must be strictly decreasing");
  }
  cfg.validate(f.grid());

  std::vector<std::future<SweepEntry>> jobs;
  jobs.reserve(schedule.size());
  for (double mu : schedule) {
    jobs.push_back(std::async(std::launch::async, solve_entry, mu, std::cref(f), std::cref(u0), std::cref(cfg)));
  }
  EllipticSolution limit = solve_tv_problem(f, u0, cfg);
  std::vector<SweepEntry> entries;
  entries.reserve(jobs.size());
  for (auto& j : jobs) entries.push_back(j.get());

  const Grid& g = f.grid();
  const double u0_sq = inner(u0, u0);
  const double value0 = limit.certificate.primal_value;
  const double dual0 = inner(limit.z, gradient(u0));
  const double slack = 10.0 * cfg.tolerance * (1.0 + std::abs(value0));

  const FaceVectorField g0 = gradient(u0);
  const double b = area_of_gradient(g0, 1.0) + u0_sq + tv_of_gradient(g0);

  SweepReport r{.entries = {}, .limit = std::move(limit)};
  r.coercive_bound = std::sqrt(2.0 * b);
  r.values_within_bounds = true;
  r.dual_trend_monotone = true;
  r.envelope_holds = true;
  r.coercive_bound_holds = true;
  double previous = std::numeric_limits<double>::infinity();
  for (auto& e : entries) {
    e.value_deviation = std::abs(e.value - value0);
    e.value_bound = e.mu * g.domain_volume() + 0.5 * e.mu * u0_sq;
    if (e.value_deviation > e.value_bound + slack) r.values_within_bounds = false;
    const double dev = std::abs(e.dual_value - dual0);
    if (dev > previous + slack) r.dual_trend_monotone = false;
    previous = dev;
    const double tv_part = e.tv_value + inner(f, e.u) - inner(f, u0);
    if (value0 > tv_part + e.mu * g.domain_volume() + slack) r.envelope_holds = false;
    if (e.sqrt_mu_u_l2 > r.coercive_bound) r.coercive_bound_holds = false;
  }
  r.entries = std::move(entries);
  return r;
}

}  // namespace tvflow
