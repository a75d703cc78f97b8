// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/harness/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "tvflow/energy.hpp"
#include "tvflow/field_io.hpp"
#include "tvflow/flow.hpp"

namespace tvflow::harness {

namespace {

namespace fs = std::filesystem;

// Feasibility bound on ||z||_inf for returned dual fields.
constexpr double kSupSlack = 1e-9;

json values(const ScalarField& u) { return json(std::vector<double>(u.values().begin(), u.values().end())); }
json values(const FaceVectorField& z) { return json(std::vector<double>(z.values().begin(), z.values().end())); }

std::vector<double> numbers(const json& j, const std::string& key) {
  if (!j.is_array()) throw ValidationError(key, "expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw ValidationError(key, "expected an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

ScalarField scalar(const Grid& g, const json& j, const std::string& key) {
  try {
    return ScalarField(g, numbers(j, key));
  } catch (const InvalidArgument& e) {
    throw ValidationError(key, e.what());
  }
}

FaceVectorField faces(const Grid& g, const json& j, const std::string& key) {
  std::vector<double> v = numbers(j, key);
  if (v.size() != g.face_count()) throw ValidationError(key, "expected " + std::to_string(g.face_count()) + " faces");
  return FaceVectorField(g, std::move(v));
}

ScalarField scaled(ScalarField f, double c) {
  for (double& v : f.values()) v *= c;
  return f;
}

// sup over Omega of |a - b|.
double max_abs_difference(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  const Grid& g = a.grid();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) m = std::max(m, std::abs(a.at(i, j) - b.at(i, j)));
  }
  return m;
}

const json& member(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(key, "missing from solution document");
  return j.at(key);
}

// One named inequality value <= limit.
struct Checks {
  json doc = json::object();
  std::vector<std::string> failures;

  void add(const std::string& prefix, const std::string& name, double value, double limit) {
    const bool ok = value <= limit;
    doc[name] = {{"value", value}, {"limit", limit}, {"ok", ok}};
    if (!ok) fail(prefix, name, value, limit);
  }
  void flag(const std::string& prefix, const std::string& name, bool ok) {
    doc[name] = ok;
    if (!ok) failures.push_back(prefix + name + " failed");
  }
  void fail(const std::string& prefix, const std::string& name, double value, double limit) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s: %.6g exceeds %.6g", prefix.c_str(), name.c_str(), value, limit);
    failures.emplace_back(buf);
  }
  bool ok() const { return failures.empty(); }
};

json certificate_json(const DualityCertificate& c) {
  return json{{"primal_value", c.primal_value},     {"dual_value", c.dual_value},
              {"gap", c.gap},                       {"estimate_value", c.estimate_value},
              {"div_residual_linf", c.div_residual}, {"feasibility_excess", c.feasibility_excess},
              {"z_linf", c.z_linf},                 {"iterations", c.iterations}};
}

// Termination criteria of solve_psi, re-evaluated on a stored pair.
Checks elliptic_checks(const DualityCertificate& c, const ScalarField& u, const EnergyParams& p, double tol,
                       const std::string& prefix = "") {
  Checks k;
  k.add(prefix, "gap", c.gap, tol * (1.0 + std::abs(c.primal_value)));
  k.add(prefix, "div_residual", c.div_residual, tol * divergence_scale(u, p));
  k.add(prefix, "z_linf", c.z_linf, 1.0 + kSupSlack);
  return k;
}

json slice_json(const SliceCertificate& c, bool with_solver) {
  json j{{"time_index", c.time_index},
         {"time", c.time},
         {"tv_value", c.tv_value},
         {"l2_step", c.l2_step},
         {"maximal_pairing_residual", c.maximal_pairing_residual},
         {"div_residual", c.div_residual},
         {"z_linf", c.z_linf},
         {"variational_violation", c.variational_violation},
         {"identity_residual", c.weak.identity_residual},
         {"comparisons", c.variational.count},
         {"verify_tolerance", c.weak.tolerance},
         {"w_minus_one_inf_feasible", c.w_minus_one_inf_feasible},
         {"dual_norm", c.dual_norm},
         {"dissipation_excess", c.dissipation_excess},
         {"checks",
          {{"variational", c.variational.passed},
           {"sup_norm", c.weak.sup_norm_ok},
           {"divergence", c.weak.divergence_ok},
           {"maximal_pairing", c.weak.maximal_pairing_ok},
           {"identity", c.weak.identity_ok},
           {"w_minus_one_inf", c.w_minus_one_inf_feasible},
           {"dissipation", c.dissipation_ok}}},
         {"passed", c.passed()}};
  if (with_solver) j["solver"] = certificate_json(c.solver);
  return j;
}

std::vector<std::string> slice_failures(const SliceCertificate& c) {
  std::vector<std::string> out;
  const std::string at = "slice " + std::to_string(c.time_index) + ": ";
  char buf[200];
  const auto add = [&](bool ok, const char* name, double value, double limit) {
    if (ok) return;
    std::snprintf(buf, sizeof buf, "%s%s: %.6g exceeds %.6g", at.c_str(), name, value, limit);
    out.emplace_back(buf);
  };
  add(c.variational.passed, "variational", c.variational.worst_violation, c.variational.tolerance);
  add(c.weak.sup_norm_ok, "sup_norm", c.weak.z_linf, 1.0 + kSupSlack);
  add(c.weak.divergence_ok, "divergence", c.weak.div_residual, c.weak.tolerance);
  add(c.weak.maximal_pairing_ok, "maximal_pairing", c.weak.pairing_residual, c.weak.tolerance);
  add(c.weak.identity_ok, "identity", c.weak.identity_residual, c.weak.tolerance);
  add(c.w_minus_one_inf_feasible, "w_minus_one_inf", c.dual_norm, 1.0);
  if (!c.dissipation_ok) {
    std::snprintf(buf, sizeof buf, "%sdissipation: excess %.6g above tolerance", at.c_str(), c.dissipation_excess);
    out.emplace_back(buf);
  }
  return out;
}

FlowConfig flow_config(const RunConfig& cfg) {
  FlowConfig f;
  f.solver = cfg.solver;
  f.verify_tolerance = cfg.verify.tolerance;
  f.dissipation_tolerance = cfg.verify.dissipation_tolerance;
  f.comparisons = cfg.comparisons;
  f.seed = cfg.seed;
  return f;
}

FlowProblem flow_problem(const RunConfig& cfg, const Grid& g) {
  FlowProblem p{g, {}, ScalarField(g), *cfg.tau, *cfg.horizon};
  if (cfg.boundary->time_dependent()) {
    const auto steps = static_cast<std::size_t>(std::llround(*cfg.horizon / *cfg.tau));
    for (std::size_t k = 0; k <= steps; ++k) {
      p.boundary.push_back(cfg.boundary->realize(g, static_cast<double>(k) * *cfg.tau));
    }
  } else {
    p.boundary.push_back(cfg.boundary->realize(g));
  }
  p.initial = extend_with_boundary(cfg.initial->realize(g), p.boundary.front());
  return p;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << s;
  if (!out) throw Error("write failed: " + path.string());
}

// --- commands ---------------------------------------------------------------

RunResult run_elliptic(const RunConfig& cfg, const Grid& g) {
  const bool tv = cfg.command == Command::tv;
  const EnergyParams params{tv ? 0.0 : *cfg.mu, tv ? 0.0 : *cfg.lambda, cfg.source->realize(g),
                            cfg.boundary->realize(g)};
  RunResult r;
  r.certificate["problem"] = {{"mu", params.mu}, {"lambda", params.lambda}};
  const EllipticSolution sol = solve_psi(params, cfg.solver);
  Checks k = elliptic_checks(sol.certificate, sol.u, params, cfg.solver.tolerance);
  r.certificate.update(certificate_json(sol.certificate));
  r.certificate["tv_value"] = total_variation(sol.u, params.u0);
  r.certificate["checks"] = k.doc;
  r.certificate["passed"] = k.ok();
  r.failures = k.failures;
  r.solution = {{"kind", "elliptic"}, {"mu", params.mu}, {"lambda", params.lambda},
                {"source", values(params.f)}, {"boundary", values(params.u0)},
                {"u", values(sol.u)}, {"z", values(sol.z)}};
  return r;
}

RunResult run_flow(const RunConfig& cfg, const Grid& g) {
  const FlowProblem problem = flow_problem(cfg, g);
  const FlowConfig fc = flow_config(cfg);
  const FlowSolution flow = solve_flow(problem, fc);

  RunResult r;
  r.certificate["problem"] = {{"tau", problem.tau}, {"horizon", problem.horizon}, {"steps", problem.steps()},
                              {"time_dependent_boundary", !problem.time_independent()},
                              {"comparisons", fc.comparisons}};
  json slices = json::array();
  for (std::size_t k = 1; k < flow.slices.size(); ++k) {
    const SliceCertificate& c = flow.slices[k].certificate;
    slices.push_back(slice_json(c, true));
    for (auto& f : slice_failures(c)) r.failures.push_back(std::move(f));
  }
  const IntegratedReport integ =
      verify_variational_integrated(flow, problem, fc.comparisons, fc.seed, fc.verify_tolerance);
  r.certificate["slices"] = std::move(slices);
  r.certificate["tv_series"] = flow.tv_series;
  r.certificate["integrated"] = {{"worst_violation", integ.worst_violation}, {"count", integ.count},
                                 {"tolerance", integ.tolerance}, {"passed", integ.passed}};
  if (!integ.passed) r.failures.push_back("integrated variational inequality: " + fmt(integ.worst_violation));
  r.certificate["passed"] = r.failures.empty();

  json bnd = json::array();
  for (const auto& b : problem.boundary) bnd.push_back(values(b));
  json us = json::array();
  for (const auto& s : flow.slices) us.push_back({{"u", values(s.u)}, {"z", values(s.z)}});
  r.solution = {{"kind", "flow"}, {"tau", problem.tau}, {"horizon", problem.horizon},
                {"boundary", std::move(bnd)}, {"slices", std::move(us)}};
  return r;
}

RunResult run_sweep(const RunConfig& cfg, const Grid& g) {
  const ScalarField f = cfg.source->realize(g);
  const ScalarField u0 = cfg.boundary->realize(g);
  const SweepReport rep = mu_sweep(f, u0, cfg.schedule, cfg.solver);

  RunResult r;
  Checks k;
  json entries = json::array();
  json sol_entries = json::array();
  for (const SweepEntry& e : rep.entries) {
    const std::string at = "mu " + fmt(e.mu) + ": ";
    const EnergyParams p{e.mu, e.mu, scaled(f, 1.0 - e.mu), u0};
    Checks ek = elliptic_checks(e.certificate, e.u, p, cfg.solver.tolerance, at);
    for (auto& x : ek.failures) k.failures.push_back(std::move(x));
    entries.push_back({{"mu", e.mu},
                       {"value", e.value},
                       {"dual_value", e.dual_value},
                       {"tv_value", e.tv_value},
                       {"div_residual", e.div_residual},
                       {"sqrt_mu_u_l2", e.sqrt_mu_u_l2},
                       {"value_deviation", e.value_deviation},
                       {"value_bound", e.value_bound},
                       {"certificate", certificate_json(e.certificate)},
                       {"checks", ek.doc}});
    sol_entries.push_back({{"mu", e.mu}, {"u", values(e.u)}, {"z", values(e.z)}});
  }
  const Checks lk = elliptic_checks(rep.limit.certificate, rep.limit.u, EnergyParams{0.0, 0.0, f, u0},
                                    cfg.solver.tolerance, "limit: ");
  for (const auto& x : lk.failures) k.failures.push_back(x);
  k.flag("", "values_within_bounds", rep.values_within_bounds);
  k.flag("", "dual_trend_monotone", rep.dual_trend_monotone);
  k.flag("", "envelope_holds", rep.envelope_holds);
  k.flag("", "coercive_bound_holds", rep.coercive_bound_holds);

  r.certificate["problem"] = {{"schedule", cfg.schedule}};
  r.certificate["entries"] = std::move(entries);
  r.certificate["limit"] = certificate_json(rep.limit.certificate);
  r.certificate["limit"]["checks"] = lk.doc;
  r.certificate["coercive_bound"] = rep.coercive_bound;
  r.certificate["checks"] = k.doc;
  r.certificate["passed"] = k.ok();
  r.failures = k.failures;
  r.solution = {{"kind", "sweep"},
                {"source", values(f)},
                {"boundary", values(u0)},
                {"entries", std::move(sol_entries)},
                {"limit", {{"u", values(rep.limit.u)}, {"z", values(rep.limit.z)}}}};
  return r;
}

RunResult run_feasibility(const RunConfig& cfg, const Grid& g) {
  const ScalarField src = cfg.source->realize(g);
  const FeasibilityResult fr = dual_feasibility(src, cfg.solver);
  RunResult r;
  Checks k;
  k.add("", "bracket", fr.lower_bound, fr.optimum + cfg.solver.tolerance);
  if (fr.witness) {
    const double res = max_abs_difference(divergence(*fr.witness), src);
    k.add("", "witness_divergence", res, cfg.solver.tolerance * (1.0 + interior_sup(src)));
    k.add("", "witness_norm", sup_norm(*fr.witness), fr.optimum * (1.0 + cfg.solver.tolerance) + 1e-15);
  }
  r.certificate["feasible"] = fr.feasible;
  r.certificate["optimum"] = fr.optimum;
  r.certificate["lower_bound"] = fr.lower_bound;
  r.certificate["margin"] = fr.margin;
  r.certificate["iterations"] = fr.iterations;
  r.certificate["checks"] = k.doc;
  r.certificate["passed"] = k.ok();
  r.failures = k.failures;
  r.solution = {{"kind", "feasibility"}, {"source", values(src)}, {"optimum", fr.optimum}};
  if (fr.witness) r.solution["witness"] = values(*fr.witness);
  return r;
}

// --- verify -------------------------------------------------------------------

RunResult verify_elliptic(const json& s, const RunConfig& cfg, const Grid& g) {
  const EnergyParams p{member(s, "mu").get<double>(), member(s, "lambda").get<double>(),
                       scalar(g, member(s, "source"), "source"), scalar(g, member(s, "boundary"), "boundary")};
  const ScalarField u = scalar(g, member(s, "u"), "u");
  const FaceVectorField z = faces(g, member(s, "z"), "z");
  const DualityCertificate c = certify(u, z, p);
  const Checks k = elliptic_checks(c, u, p, cfg.solver.tolerance);
  RunResult r;
  r.certificate = certificate_json(c);
  r.certificate["checks"] = k.doc;
  r.certificate["passed"] = k.ok();
  r.failures = k.failures;
  return r;
}

RunResult verify_flow(const json& s, const RunConfig& cfg, const Grid& g) {
  const double tau = member(s, "tau").get<double>();
  std::vector<ScalarField> boundary;
  for (const auto& b : member(s, "boundary")) boundary.push_back(scalar(g, b, "boundary"));
  if (boundary.empty()) throw ValidationError("boundary", "empty");
  const json& slices = member(s, "slices");
  if (slices.size() < 1) throw ValidationError("slices", "empty");
  const bool fixed = boundary.size() == 1;
  if (!fixed && boundary.size() != slices.size()) throw ValidationError("boundary", "one field per time node expected");

  const FlowConfig fc = flow_config(cfg);
  RunResult r;
  json out = json::array();
  ScalarField prev = scalar(g, member(slices[0], "u"), "slices[0].u");
  for (std::size_t k = 1; k < slices.size(); ++k) {
    const std::string key = "slices[" + std::to_string(k) + "]";
    const ScalarField u = scalar(g, member(slices[k], "u"), key + ".u");
    const FaceVectorField z = faces(g, member(slices[k], "z"), key + ".z");
    const ScalarField& u0 = boundary[fixed ? 0 : k];
    const SliceCertificate c = certify_slice(u, z, prev, u0, tau, fc, k, fixed);
    out.push_back(slice_json(c, false));
    for (auto& f : slice_failures(c)) r.failures.push_back(std::move(f));
    prev = u;
  }
  r.certificate["slices"] = std::move(out);
  r.certificate["passed"] = r.failures.empty();
  return r;
}

RunResult verify_sweep(const json& s, const RunConfig& cfg, const Grid& g) {
  const ScalarField f = scalar(g, member(s, "source"), "source");
  const ScalarField u0 = scalar(g, member(s, "boundary"), "boundary");
  RunResult r;
  json out = json::array();
  for (const auto& e : member(s, "entries")) {
    const double mu = member(e, "mu").get<double>();
    const EnergyParams p{mu, mu, scaled(f, 1.0 - mu), u0};
    const ScalarField u = scalar(g, member(e, "u"), "u");
    const DualityCertificate c = certify(u, faces(g, member(e, "z"), "z"), p);
    const Checks k = elliptic_checks(c, u, p, cfg.solver.tolerance, "mu " + fmt(mu) + ": ");
    out.push_back({{"mu", mu}, {"certificate", certificate_json(c)}, {"checks", k.doc}});
    r.failures.insert(r.failures.end(), k.failures.begin(), k.failures.end());
  }
  const json& lim = member(s, "limit");
  const EnergyParams p{0.0, 0.0, f, u0};
  const ScalarField u = scalar(g, member(lim, "u"), "limit.u");
  const DualityCertificate c = certify(u, faces(g, member(lim, "z"), "limit.z"), p);
  const Checks k = elliptic_checks(c, u, p, cfg.solver.tolerance, "limit: ");
  r.failures.insert(r.failures.end(), k.failures.begin(), k.failures.end());
  r.certificate["entries"] = std::move(out);
  r.certificate["limit"] = certificate_json(c);
  r.certificate["limit"]["checks"] = k.doc;
  r.certificate["passed"] = r.failures.empty();
  return r;
}

RunResult verify_feasibility(const json& s, const RunConfig& cfg, const Grid& g) {
  const ScalarField src = scalar(g, member(s, "source"), "source");
  const double optimum = member(s, "optimum").get<double>();
  RunResult r;
  Checks k;
  if (s.contains("witness")) {
    const FaceVectorField w = faces(g, s["witness"], "witness");
    k.add("", "witness_divergence", max_abs_difference(divergence(w), src),
          cfg.solver.tolerance * (1.0 + interior_sup(src)));
    k.add("", "witness_norm", sup_norm(w), optimum * (1.0 + cfg.solver.tolerance) + 1e-15);
  }
  r.certificate["checks"] = k.doc;
  r.certificate["passed"] = k.ok();
  r.failures = k.failures;
  return r;
}

RunResult dispatch(const RunConfig& cfg) {
  const Grid g = Grid::build(cfg.grid);
  switch (cfg.command) {
    case Command::elliptic:
    case Command::tv: return run_elliptic(cfg, g);
    case Command::flow: return run_flow(cfg, g);
    case Command::sweep: return run_sweep(cfg, g);
    case Command::feasibility: return run_feasibility(cfg, g);
    case Command::verify: break;
  }
  std::ifstream in(cfg.solution);
  if (!in) throw ParseError(cfg.solution.string(), "cannot read solution file");
  json s;
  try {
    s = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(cfg.solution.string(), e.what());
  }
  return verify_solution(s);
}

void write_artifacts(const RunConfig& cfg, const RunResult& r) {
  if (cfg.output.empty()) return;
  fs::create_directories(cfg.output);
  write_text(cfg.output / "certificate.json", dump(r.certificate));
  if (!r.solution.is_null()) write_text(cfg.output / "solution.json", dump(r.solution));

  const std::string seed_line = "# seed " + std::to_string(cfg.seed) + "\n";
  if (cfg.command == Command::flow && r.certificate.contains("slices")) {
    std::string csv = seed_line + "time_index,time,tv_value,l2_step,maximal_pairing_residual,div_residual,"
                                  "variational_violation,dissipation_excess,dual_norm\n";
    csv += "0,0," + fmt(r.certificate["tv_series"][0].get<double>()) + ",0,0,0,0,0,0\n";
    for (const auto& s : r.certificate["slices"]) {
      csv += std::to_string(s["time_index"].get<std::size_t>());
      for (const char* key : {"time", "tv_value", "l2_step", "maximal_pairing_residual", "div_residual",
                              "variational_violation", "dissipation_excess", "dual_norm"}) {
        csv += "," + fmt(s[key].get<double>());
      }
      csv += "\n";
    }
    write_text(cfg.output / "series.csv", csv);
  }
  if (cfg.command == Command::sweep && r.certificate.contains("entries")) {
    std::string csv = seed_line + "mu,value,dual_value,tv_value,div_residual,sqrt_mu_u_l2,value_deviation,value_bound\n";
    for (const auto& e : r.certificate["entries"]) {
      csv += fmt(e["mu"].get<double>());
      for (const char* key :
           {"value", "dual_value", "tv_value", "div_residual", "sqrt_mu_u_l2", "value_deviation", "value_bound"}) {
        csv += "," + fmt(e[key].get<double>());
      }
      csv += "\n";
    }
    write_text(cfg.output / "series.csv", csv);
  }

  if (!cfg.dump_fields || r.solution.is_null()) return;
  const fs::path dir = cfg.output / "fields";
  fs::create_directories(dir);
  const Grid g = Grid::build(cfg.grid);
  const auto save = [&](const json& j, const std::string& name) {
    save_raw(dir / (name + ".raw"), scalar(g, j, name));
  };
  const json& s = r.solution;
  if (s.contains("u")) save(s["u"], "u");
  if (s.contains("slices")) {
    for (std::size_t k = 0; k < s["slices"].size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "u_%05zu", k);
      save(s["slices"][k]["u"], name);
    }
  }
  if (s.contains("entries")) {
    for (std::size_t k = 0; k < s["entries"].size(); ++k) save(s["entries"][k]["u"], "u_mu_" + std::to_string(k));
    save(s["limit"]["u"], "u_limit");
  }
}

// The settings of the producing run; data come from the document itself, so
// the files the run read need not exist any more.
RunConfig stored_settings(const json& c) {
  RunConfig cfg;
  cfg.command = command_from_string(member(c, "command").get<std::string>());
  cfg.grid = grid_from_json(member(c, "grid"));
  cfg.solver = solver_from_json(member(c, "solver"));
  if (c.contains("verify")) {
    cfg.verify.tolerance = c["verify"].at("tolerance").get<double>();
    cfg.verify.dissipation_tolerance = c["verify"].at("dissipation_tolerance").get<double>();
  }
  if (c.contains("comparisons")) cfg.comparisons = c["comparisons"].get<std::size_t>();
  cfg.seed = member(c, "seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RunResult verify_solution(const json& s) {
  RunResult r;
  try {
    const RunConfig cfg = stored_settings(member(s, "config"));
    const Grid g = Grid::build(cfg.grid);
    const std::string kind = member(s, "kind").get<std::string>();
    if (kind == "elliptic") {
      r = verify_elliptic(s, cfg, g);
    } else if (kind == "flow") {
      r = verify_flow(s, cfg, g);
    } else if (kind == "sweep") {
      r = verify_sweep(s, cfg, g);
    } else if (kind == "feasibility") {
      r = verify_feasibility(s, cfg, g);
    } else {
      throw ValidationError("kind", "unknown solution kind \"" + kind + "\"");
    }
    r.certificate["kind"] = kind;
    r.certificate["seed"] = cfg.seed;
    r.exit_code = r.failures.empty() ? exit_pass : exit_certificate_failure;
  } catch (const ParseError& e) {
    r = RunResult{exit_config_error, {e.what()}, {}, {}};
  } catch (const ValidationError& e) {
    r = RunResult{exit_config_error, {e.what()}, {}, {}};
  } catch (const json::exception& e) {
    r = RunResult{exit_config_error, {std::string("malformed solution document: ") + e.what()}, {}, {}};
  } catch (const InvalidArgument& e) {
    r = RunResult{exit_config_error, {e.what()}, {}, {}};
  }
  return r;
}

RunResult run(const RunConfig& cfg) {
  RunResult r;
  const json config = cfg.to_json();
  try {
    cfg.validate();
    r = dispatch(cfg);
    if (r.exit_code == exit_pass && !r.failures.empty()) r.exit_code = exit_certificate_failure;
  } catch (const ParseError& e) {
    r = RunResult{exit_config_error, {e.what()}, {}, {}};
  } catch (const ValidationError& e) {
    r = RunResult{exit_config_error, {e.what()}, {}, {}};
  } catch (const FlowStepError& e) {
    r = RunResult{exit_non_convergence, {"time step " + std::to_string(e.time_index()) + ": " + e.what()}, {}, {}};
    r.certificate = {{"status", "non_convergence"}, {"time_index", e.time_index()}, {"last_gap", e.last_gap()}};
  } catch (const NonConvergence& e) {
    r = RunResult{exit_non_convergence, {e.what()}, {}, {}};
    r.certificate = {{"status", "non_convergence"}, {"iterations", e.iterations()}, {"last_gap", e.last_gap()}};
  } catch (const UnboundedBelow& e) {
    // No minimizer exists; the certificate records the certified obstruction.
    r = RunResult{exit_certificate_failure, {e.what()}, {}, {}};
    r.certificate = {{"status", "unbounded_below"}, {"dual_norm_lower_bound", e.dual_norm_lower_bound()}};
  } catch (const InvalidArgument& e) {
    r = RunResult{exit_config_error, {e.what()}, {}, {}};
  } catch (const FormatError& e) {
    r = RunResult{exit_config_error, {e.what()}, {}, {}};
  }

  if (r.exit_code == exit_config_error) return r;
  if (!r.certificate.contains("status")) r.certificate["status"] = r.failures.empty() ? "pass" : "fail";
  r.certificate["command"] = to_string(cfg.command);
  r.certificate["seed"] = cfg.seed;
  if (cfg.command != Command::verify) {
    json problem = r.certificate.value("problem", json::object());
    problem["grid"] = grid_to_json(cfg.grid);
    for (const char* key : {"source", "boundary", "initial"}) {
      if (config.contains(key)) problem[key] = config[key];
    }
    r.certificate["problem"] = problem;
  }
  if (!r.solution.is_null()) {
    json stored = config;
    stored.erase("output");
    r.solution["config"] = stored;
    r.solution["seed"] = cfg.seed;
  }
  write_artifacts(cfg, r);
  return r;
}

}  // namespace tvflow::harness
