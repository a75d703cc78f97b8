// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "tvflow/elliptic.hpp"
#include "tvflow/energy.hpp"
#include "tvflow/error.hpp"
#include "tvflow/kernels.hpp"

namespace tvflow {
namespace {

// 1D: z at face k is c + sum_{i<k} g_i h; the best constant centres the range.
FeasibilityResult exact_1d(const ScalarField& g, double tol) {
  const Grid& grid = g.grid();
  const int n = grid.nx();
  std::vector<double> s(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i < n; ++i) s[i + 1] = s[i] + g.at(i) * grid.spacing();
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double c = -0.5 * (*hi + *lo);
  FaceVectorField z(grid);
  for (int i = 0; i <= n; ++i) z[grid.x_face(i)] = c + s[i];
  FeasibilityResult r;
  r.optimum = 0.5 * (*hi - *lo);
  r.lower_bound = r.optimum;
  r.margin = r.optimum - 1.0;
  r.feasible = r.optimum <= 1.0 + tol;
  r.witness = std::move(z);
  return r;
}

// Prox of R * (max group norm), unweighted: clip every group norm at the level
// t solving sum (n_g - t)_+ = R (all zero when sum n_g <= R).
void prox_max_norm(FaceVectorField& z, double radius) {
  const Grid& grid = z.grid();
  double* d = z.data();
  std::vector<double> norms;
  norms.reserve(grid.interior_count() + grid.boundary_faces().size());
  const auto visit = [&](const std::function<void(double*, double*)>& fn) {
    for (const auto& seg : grid.group_segments()) {
      if (seg.x_face < 0 && seg.y_face < 0) continue;
      for (std::size_t c = 0; c < seg.length; ++c) {
        fn(seg.x_face >= 0 ? d + seg.x_face + c : nullptr, seg.y_face >= 0 ? d + seg.y_face + c : nullptr);
      }
    }
    for (const auto& b : grid.boundary_faces()) fn(d + b.face, nullptr);
  };
  const auto norm_of = [](const double* a, const double* b) {
    const double x = a ? *a : 0.0;
    const double y = b ? *b : 0.0;
    return std::sqrt(x * x + y * y);
  };
  visit([&](double* a, double* b) { norms.push_back(norm_of(a, b)); });

  double total = 0.0;
  for (double v : norms) total += v;
  if (total <= radius) {
    std::fill(z.values().begin(), z.values().end(), 0.0);
    return;
  }
  std::vector<double> sorted = norms;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double level = 0.0;
  double acc = 0.0;
  for (std::size_t m = 0; m < sorted.size(); ++m) {
    acc += sorted[m];
    const double t = (acc - radius) / static_cast<double>(m + 1);
    const double next = m + 1 < sorted.size() ? sorted[m + 1] : 0.0;
    if (t >= next) {
      level = t;
      break;
    }
  }
  visit([&](double* a, double* b) {
    const double n = norm_of(a, b);
    if (n <= level) return;
    const double s = level / n;
    if (a) *a *= s;
    if (b) *b *= s;
  });
}

// Primal-dual iteration on min_z max_w ||z||_inf + <w, div z - g>; every
// check brackets the optimum between the divergence-projected iterate (upper)
// and the bound <g, w> / ||grad w||_1 from the multiplier (lower).
FeasibilityResult primal_dual(const ScalarField& g, const SolverConfig& cfg) {
  const Grid& grid = g.grid();
  const auto& k = kernels::active();
  const double norm2 = 4.0 * grid.dimension() / (grid.spacing() * grid.spacing());
  const double tau = 0.99 / std::sqrt(norm2);
  const double sigma = 0.99 / std::sqrt(norm2);
  const double radius = tau / grid.cell_volume();

  FeasibilityResult best;
  best.optimum = std::numeric_limits<double>::infinity();
  best.lower_bound = 0.0;

  // A first witness straight from the Poisson projection of zero.
  {
    FaceVectorField z0 = project_onto_divergence(FaceVectorField(grid), g);
    best.optimum = sup_norm(z0);
    best.witness = std::move(z0);
  }

  FaceVectorField z = *best.witness;
  ScalarField w(grid);
  const double tol = cfg.tolerance;
  const auto done = [&] { return best.optimum - best.lower_bound <= tol * std::max(1.0, best.optimum); };

  std::size_t it = 0;
  while (!done() && it < cfg.max_iterations) {
    ++it;
    const FaceVectorField gw = gradient(w);
    FaceVectorField z_new = z;
    k.axpy(tau, gw.data(), z_new.data(), z_new.size());
    prox_max_norm(z_new, radius);
    FaceVectorField z_bar = z_new;
    k.axpy(-1.0, z.data(), z_bar.data(), z_bar.size());
    k.axpy(1.0, z_new.data(), z_bar.data(), z_bar.size());
    z = std::move(z_new);
    const ScalarField dz = divergence(z_bar);
    for (int j = 0; j < grid.ny(); ++j) {
      for (int i = 0; i < grid.nx(); ++i) w.at(i, j) += sigma * (dz.at(i, j) - g.at(i, j));
    }

    if (it % cfg.check_interval != 0) continue;
    FaceVectorField zp = project_onto_divergence(z, g);
    const double upper = sup_norm(zp);
    if (upper < best.optimum) {
      best.optimum = upper;
      best.witness = std::move(zp);
    }
    const double denom = tv_of_gradient(gradient(w));
    if (denom > 0.0) best.lower_bound = std::max(best.lower_bound, std::abs(inner(g, w)) / denom);
  }
  best.iterations = it;
  best.margin = best.optimum - 1.0;
  best.feasible = best.optimum <= 1.0 + tol;
  if (!done()) {
    const bool decided = best.feasible || best.lower_bound > 1.0 + tol;
    if (!decided) {
      throw NonConvergence(it, best.optimum - best.lower_bound,
                           "dual feasibility undecided: bracket [" + std::to_string(best.lower_bound) +
                               ", " + std::to_string(best.optimum) + "]");
    }
  }
  return best;
}

}  // namespace

FeasibilityResult dual_feasibility(const ScalarField& g, const SolverConfig& cfg, FeasibilityMethod method) {
  cfg.validate(g.grid());
  if (interior_sup(g) == 0.0) {
    FeasibilityResult r;
    r.feasible = true;
    r.margin = -1.0;
    r.witness = FaceVectorField(g.grid());
    return r;
  }
  if (method == FeasibilityMethod::exact_1d ||
      (method == FeasibilityMethod::automatic && g.grid().dimension() == 1)) {
    if (g.grid().dimension() != 1) throw InvalidArgument("exact dual feasibility is 1D only");
    return exact_1d(g, cfg.tolerance);
  }
  return primal_dual(g, cfg);
}

}  // namespace tvflow
