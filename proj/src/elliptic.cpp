// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "tvflow/error.hpp"
#include "tvflow/kernels.hpp"

namespace tvflow {
namespace {

double operator_norm_squared(const Grid& g) {
  return 4.0 * g.dimension() / (g.spacing() * g.spacing());
}

// Solves r (1 + kappa / sqrt(1 - r^2)) = rho for r in [0, 1) through r = sin(theta),
// Newton in theta safeguarded by bisection.
double radial_shrink(double rho, double kappa, double tol) {
  if (rho <= 0.0) return 0.0;
  const double half_pi = std::numbers::pi / 2.0;
  const double r0 = rho / (1.0 + kappa);  // the root is never above r0
  double lo = 0.0;
  double hi = r0 < 1.0 ? std::asin(r0) : half_pi;
  double th = hi;
  for (int it = 0; it < 200; ++it) {
    const double c = std::cos(th);
    const double phi = std::sin(th) + kappa * std::tan(th) - rho;
    if (phi > 0.0) {
      hi = th;
    } else {
      lo = th;
    }
    const double dphi = c + kappa / (c * c);
    double next = th - phi / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - th) <= tol || hi - lo <= tol) return std::sin(next);
    th = next;
  }
  return std::sin(th);
}

// Dual proximal map in place: per-group radial shrink (mu > 0) or projection
// onto the unit ball (mu = 0); boundary faces are clamped.
void dual_prox(FaceVectorField& z, double kappa, double newton_tol) {
  const Grid& g = z.grid();
  const auto& k = kernels::active();
  double* d = z.data();
  for (const auto& seg : g.group_segments()) {
    if (seg.x_face < 0 && seg.y_face < 0) continue;
    if (kappa == 0.0) {
      if (seg.x_face >= 0 && seg.y_face >= 0) {
        k.project_disk(d + seg.x_face, d + seg.y_face, seg.length);
      } else {
        k.clamp_unit(d + (seg.x_face >= 0 ? seg.x_face : seg.y_face), seg.length);
      }
      continue;
    }
    for (std::size_t c = 0; c < seg.length; ++c) {
      double* zx = seg.x_face >= 0 ? d + seg.x_face + c : nullptr;
      double* zy = seg.y_face >= 0 ? d + seg.y_face + c : nullptr;
      const double ax = zx ? *zx : 0.0;
      const double ay = zy ? *zy : 0.0;
      const double rho = std::sqrt(ax * ax + ay * ay);
      if (rho == 0.0) continue;
      const double s = radial_shrink(rho, kappa, newton_tol) / rho;
      if (zx) *zx = ax * s;
      if (zy) *zy = ay * s;
    }
  }
  for (const auto& b : g.boundary_faces()) d[b.face] = std::clamp(d[b.face], -1.0, 1.0);
}

// Projects every group into the closed unit ball.
void project_groups(FaceVectorField& z) { dual_prox(z, 0.0, 0.0); }

// u on Omega from the dual: (div z - f) / lambda, extended by u0.
ScalarField primal_from_dual(const ScalarField& div, const EnergyParams& p) {
  ScalarField u = p.u0;
  const Grid& g = u.grid();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) u.at(i, j) = (div.at(i, j) - p.f.at(i, j)) / p.lambda;
  }
  return u;
}

bool has_source(const ScalarField& f) { return interior_sup(f) > 0.0; }

// Dirichlet Laplacian -div grad with zero collar, by conjugate gradients.
ScalarField solve_poisson(const ScalarField& rhs) {
  const Grid& g = rhs.grid();
  ScalarField phi(g);
  ScalarField r(g);
  for (int j = 0; j < g.ny(); ++j) std::copy(rhs.row(j), rhs.row(j) + g.nx(), r.row(j));
  ScalarField p = r;
  double rr = inner(r, r);
  const double stop = 1e-30 * std::max(rr, 1e-300);
  const std::size_t limit = 4 * g.interior_count() + 100;
  for (std::size_t it = 0; it < limit && rr > stop; ++it) {
    ScalarField ap = divergence(gradient(p));
    for (double& v : ap.values()) v = -v;
    const double pap = inner(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        phi.at(i, j) += alpha * p.at(i, j);
        r.at(i, j) -= alpha * ap.at(i, j);
      }
    }
    const double rr_new = inner(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) p.at(i, j) = r.at(i, j) + beta * p.at(i, j);
    }
  }
  return phi;
}

// Makes z admissible for the lambda = 0 dual: div z = f exactly, then back
// into the unit ball along the segment towards a strictly feasible witness.
FaceVectorField repair_dual(const FaceVectorField& z, const ScalarField& f,
                            const std::optional<FaceVectorField>& witness, double witness_norm) {
  FaceVectorField out = project_onto_divergence(z, f);
  const double t = sup_norm(out);
  if (t <= 1.0) return out;
  if (witness_norm >= 1.0) return out;
  const double theta = (t - 1.0) / (t - witness_norm);
  auto v = out.values();
  if (witness) {
    auto w = witness->values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - theta) * v[i] + theta * w[i];
  } else {
    for (double& x : v) x *= 1.0 - theta;
  }
  // Rounding can leave a group a few ulps above 1.
  project_groups(out);
  return out;
}

std::string describe(const DualityCertificate& c) {
  std::ostringstream os;
  os.precision(6);
  os << "primal " << c.primal_value << ", dual " << c.dual_value << ", gap " << c.gap
     << ", div residual " << c.div_residual;
  return os.str();
}

void check_params(const EnergyParams& p) {
  require_same_grid(p.f.grid(), p.u0.grid());
  if (!(p.mu >= 0.0) || !std::isfinite(p.mu)) throw InvalidArgument("mu must be finite and >= 0");
  if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) {
    throw InvalidArgument("lambda must be finite and >= 0");
  }
}

}  // namespace

void SolverConfig::validate(const Grid& grid) const {
  if (!(tolerance > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (max_iterations == 0) throw InvalidArgument("solver max_iterations must be positive");
  if (check_interval == 0) throw InvalidArgument("solver check_interval must be positive");
  if (!(newton_tolerance > 0.0)) throw InvalidArgument("solver newton_tolerance must be positive");
  if (!(restart_factor == 0.0 || restart_factor > 1.0)) throw InvalidArgument("solver restart_factor must be 0 or > 1");
  if (primal_step < 0.0 || dual_step < 0.0) throw InvalidArgument("solver steps must be >= 0");
  if (primal_step > 0.0 && dual_step > 0.0 &&
      primal_step * dual_step * operator_norm_squared(grid) > 1.0) {
    throw InvalidArgument("primal_step * dual_step exceeds h^2 / (4 d)");
  }
}

double DualityCertificate::relative_gap() const { return gap / (1.0 + std::abs(primal_value)); }

double divergence_scale(const ScalarField& u, const EnergyParams& params) {
  return 1.0 + interior_sup(params.f) + params.lambda * interior_sup(u);
}

DualityCertificate certify(const ScalarField& u, const FaceVectorField& z, const EnergyParams& params,
                           std::size_t iterations) {
  check_params(params);
  require_same_grid(u.grid(), params.f.grid());
  require_same_grid(z.grid(), params.f.grid());
  const Grid& g = u.grid();
  DualityCertificate c;
  c.iterations = iterations;
  c.primal_value = psi(u, params);

  const ScalarField div = divergence(z);
  const double h_d = g.cell_volume();
  double residual = 0.0;
  double lambda_terms = 0.0;
  double u0_sq = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double s = div.at(i, j) - params.f.at(i, j);
      residual = std::max(residual, std::abs(s - params.lambda * u.at(i, j)));
      const double u0 = params.u0.at(i, j);
      u0_sq += u0 * u0;
      if (params.lambda > 0.0) lambda_terms += s * u0 - s * s / (2.0 * params.lambda);
    }
  }
  const double flux = inner(z, gradient(params.u0));
  const double mass = conjugate_mass(z, params.mu);
  c.div_residual = residual;
  c.dual_value = flux + mass + lambda_terms * h_d;
  c.estimate_value = flux + 0.5 * params.lambda * u0_sq * h_d + mass;
  c.z_linf = sup_norm(z);
  c.feasibility_excess = std::max(0.0, c.z_linf - 1.0);
  c.gap = c.primal_value - c.dual_value;
  return c;
}

FaceVectorField project_onto_divergence(const FaceVectorField& z, const ScalarField& target) {
  require_same_grid(z.grid(), target.grid());
  const Grid& g = z.grid();
  ScalarField r = divergence(z);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) r.at(i, j) -= target.at(i, j);
  }
  const ScalarField phi = solve_poisson(r);
  const FaceVectorField gphi = gradient(phi);
  FaceVectorField out = z;
  kernels::active().axpy(1.0, gphi.data(), out.data(), out.size());
  return out;
}

EllipticSolution solve_psi(const EnergyParams& params, const SolverConfig& cfg, const WarmStart& warm) {
  check_params(params);
  const Grid& g = params.f.grid();
  cfg.validate(g);
  const auto& k = kernels::active();

  const double lambda = params.lambda;
  const double mu = params.mu;

  // Strictly feasible dual point for lambda = 0, and the unboundedness test.
  std::optional<FaceVectorField> witness;
  double witness_norm = 0.0;
  if (lambda == 0.0 && has_source(params.f)) {
    SolverConfig fc = cfg;
    fc.tolerance = std::min(cfg.tolerance, 1e-9);
    const FeasibilityResult feas = dual_feasibility(params.f, fc);
    if (feas.lower_bound > 1.0 + cfg.tolerance) {
      throw UnboundedBelow(feas.lower_bound,
                           "source lies outside the dual unit ball: min ||z||_inf >= " +
                               std::to_string(feas.lower_bound));
    }
    witness = feas.witness;
    witness_norm = witness ? sup_norm(*witness) : 1.0;
  }

  const double norm2 = operator_norm_squared(g);
  double tau = cfg.primal_step;
  double sigma = cfg.dual_step;
  if (tau <= 0.0 && sigma <= 0.0) {
    tau = 0.99 / std::sqrt(norm2);
    sigma = 0.99 / std::sqrt(norm2);
  } else if (tau <= 0.0) {
    tau = 0.99 / (sigma * norm2);
  } else if (sigma <= 0.0) {
    sigma = 0.99 / (tau * norm2);
  }

  ScalarField u = params.u0;
  if (warm.u) {
    require_same_grid(warm.u->grid(), g);
    u = extend_with_boundary(*warm.u, params.u0);
  }
  ScalarField u_bar = u;
  FaceVectorField z(g);
  if (warm.z) {
    require_same_grid(warm.z->grid(), g);
    z = *warm.z;
    project_groups(z);
  }

  const double blow_up = 1e12 * (1.0 + interior_sup(params.u0) + interior_sup(params.f));
  const auto nx = static_cast<std::size_t>(g.nx());
  double last_gap = std::numeric_limits<double>::infinity();
  DualityCertificate last;

  const bool accel = cfg.accelerate && lambda > 0.0;
  const double tau0 = tau, sigma0 = sigma;
  // Residual balancing: the adaptation factor decays so the steps settle.
  bool adapt = cfg.adaptive && !accel;
  double alpha = 0.5;
  ScalarField u_old(g);
  FaceVectorField z_old(g);

  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    if (adapt) {
      u_old = u;
      z_old = z;
    }
    const FaceVectorField gb = gradient(u_bar);
    k.axpy(sigma, gb.data(), z.data(), z.size());
    dual_prox(z, sigma * mu, cfg.newton_tolerance);

    const ScalarField div = divergence(z);
    const double theta = accel ? 1.0 / std::sqrt(1.0 + 2.0 * lambda * tau) : 1.0;
    const double scale = 1.0 / (1.0 + tau * lambda);
    for (int j = 0; j < g.ny(); ++j) {
      k.primal_step(u.row(j), u_bar.row(j), div.row(j), params.f.row(j), nx, tau, scale, theta);
    }
    if (accel) {
      tau *= theta;
      sigma /= theta;
      if (cfg.restart_factor > 0.0 && sigma > cfg.restart_factor * sigma0) {
        tau = tau0;
        sigma = sigma0;
      }
    }
    if (adapt) {
      ScalarField du(g);
      FaceVectorField dz(g);
      for (std::size_t i = 0; i < du.size(); ++i) du[i] = u_old[i] - u[i];
      for (std::size_t i = 0; i < dz.size(); ++i) dz.data()[i] = z_old.data()[i] - z.data()[i];
      const ScalarField ddiv = divergence(dz);
      const FaceVectorField dgrad = gradient(du);
      for (std::size_t i = 0; i < du.size(); ++i) du[i] = du[i] / tau + ddiv[i];
      for (std::size_t i = 0; i < dz.size(); ++i) dz.data()[i] = dz.data()[i] / sigma - dgrad.data()[i];
      const double p = l2_norm(du);
      const double d = std::sqrt(inner(dz, dz));
      if (p > 1.5 * d) {
        tau /= 1.0 - alpha;
        sigma *= 1.0 - alpha;
        alpha *= 0.95;
      } else if (d > 1.5 * p) {
        tau *= 1.0 - alpha;
        sigma /= 1.0 - alpha;
        alpha *= 0.95;
      }
      if (alpha < 1e-6) adapt = false;
    }

    if (it % cfg.check_interval != 0 && it != cfg.max_iterations) continue;

    if (!(interior_sup(u) < blow_up)) {
      throw UnboundedBelow(1.0, "primal iterates diverge: the objective is unbounded below");
    }

    const auto passes = [&](const DualityCertificate& c, const ScalarField& uc) {
      return c.gap <= cfg.tolerance * (1.0 + std::abs(c.primal_value)) &&
             c.div_residual <= cfg.tolerance * divergence_scale(uc, params) &&
             c.feasibility_excess <= 1e-12;
    };
    if (lambda > 0.0) {
      DualityCertificate cert = certify(u, z, params, it);
      ScalarField uz = primal_from_dual(div, params);
      DualityCertificate alt = certify(uz, z, params, it);
      last = alt.gap < cert.gap ? alt : cert;
      last_gap = last.relative_gap();
      if (passes(alt, uz)) return EllipticSolution{std::move(uz), z, alt};
      if (passes(cert, u)) return EllipticSolution{u, z, cert};
    } else {
      FaceVectorField zc = repair_dual(z, params.f, witness, witness_norm);
      last = certify(u, zc, params, it);
      last_gap = last.relative_gap();
      if (passes(last, u)) return EllipticSolution{u, std::move(zc), last};
    }
  }
  throw NonConvergence(cfg.max_iterations, last_gap,
                       "primal-dual solver did not reach the gap target after " +
                           std::to_string(cfg.max_iterations) + " iterations (" + describe(last) + ")");
}

EllipticSolution solve_area_problem(const EnergyParams& params, const SolverConfig& cfg) {
  if (!(params.mu > 0.0)) throw InvalidArgument("area problem requires mu > 0");
  return solve_psi(params, cfg);
}

EllipticSolution solve_tv_problem(const ScalarField& f, const ScalarField& u0, const SolverConfig& cfg) {
  return solve_psi(EnergyParams{0.0, 0.0, f, u0}, cfg);
}

}  // namespace tvflow
