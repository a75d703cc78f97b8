// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tvflow/field_io.hpp"
#include "tvflow/flow.hpp"

namespace tvflow::harness {

namespace {

const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names{
      {"elliptic", Command::elliptic}, {"tv", Command::tv},         {"flow", Command::flow},
      {"sweep", Command::sweep},       {"verify", Command::verify}, {"feasibility", Command::feasibility},
  };
  return names;
}

// Keys each command accepts besides command, grid, seed, output, dump_fields and solver.
const std::set<std::string>& command_keys(Command c) {
  static const std::map<Command, std::set<std::string>> keys{
      {Command::elliptic, {"mu", "lambda", "source", "boundary"}},
      {Command::tv, {"source", "boundary"}},
      {Command::flow, {"boundary", "initial", "tau", "horizon", "verify", "comparisons"}},
      {Command::sweep, {"source", "boundary", "schedule"}},
      {Command::verify, {"solution", "verify", "comparisons"}},
      {Command::feasibility, {"source"}},
  };
  return keys.at(c);
}

const std::set<std::string> common_keys{"command", "grid", "seed", "output", "dump_fields", "solver"};

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ValidationError(key, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(key, "must be finite");
  return v;
}

std::uint64_t count(const json& j, const std::string& key) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ValidationError(key, "expected a non-negative integer");
}

int small_int(const json& j, const std::string& key) {
  const std::uint64_t v = count(j, key);
  if (v > 1u << 20) throw ValidationError(key, "value too large");
  return static_cast<int>(v);
}

bool boolean(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw ValidationError(key, "expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& key) {
  if (!j.is_string()) throw ValidationError(key, "expected a string");
  return j.get<std::string>();
}

void only_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ValidationError(where, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) throw ValidationError(where.empty() ? k : where + "." + k, "unknown key");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::filesystem::path existing_file(const std::filesystem::path& base, const json& j, const std::string& key) {
  const auto path = resolve(base, text(j, key));
  if (!std::filesystem::is_regular_file(path)) throw ParseError(key, "cannot read file " + path.string());
  return path;
}

Expression expression(const std::string& s, const std::string& key) {
  try {
    return Expression::parse(s);
  } catch (const ExpressionError& e) {
    throw ParseError(key, e.what());
  }
}

Datum datum(const json& j, const std::string& key, const std::filesystem::path& base) {
  Datum d;
  if (j.is_number()) {
    d.value = number(j, key);
  } else if (j.is_string()) {
    d.value = expression(j.get<std::string>(), key);
  } else if (j.is_object() && j.size() == 1) {
    const auto& [k, v] = *j.items().begin();
    if (k == "expr") {
      d.value = expression(text(v, key + ".expr"), key + ".expr");
    } else if (k == "csv") {
      d.value = Datum::Csv{existing_file(base, v, key + ".csv")};
    } else if (k == "raw") {
      d.value = Datum::Raw{existing_file(base, v, key + ".raw")};
    } else {
      throw ValidationError(key + "." + k, "unknown key");
    }
  } else {
    throw ValidationError(key, "expected a number, an expression, or one of {expr, csv, raw}");
  }
  return d;
}

}  // namespace

GridSpec grid_from_json(const json& j) {
  only_keys(j, "grid", {"dimension", "shape", "spacing", "collar_width", "origin"});
  for (const char* k : {"dimension", "shape", "spacing"}) {
    if (!j.contains(k)) throw ValidationError(std::string("grid.") + k, "required");
  }
  GridSpec s;
  s.dimension = small_int(j["dimension"], "grid.dimension");
  if (s.dimension != 1 && s.dimension != 2) throw ValidationError("grid.dimension", "must be 1 or 2");
  const auto d = static_cast<std::size_t>(s.dimension);
  const auto axes = [&](const json& a, const std::string& key) {
    if (!a.is_array() || a.size() != d) {
      throw ValidationError(key, "expected an array of " + std::to_string(d) + " entries");
    }
  };
  axes(j["shape"], "grid.shape");
  for (std::size_t a = 0; a < d; ++a) {
    s.shape[a] = small_int(j["shape"][a], "grid.shape");
    if (s.shape[a] < 1) throw ValidationError("grid.shape", "entries must be >= 1");
  }
  if (d == 1) s.shape[1] = 1;
  s.spacing = number(j["spacing"], "grid.spacing");
  if (!(s.spacing > 0.0)) throw ValidationError("grid.spacing", "must be positive");
  if (j.contains("collar_width")) {
    s.collar_width = small_int(j["collar_width"], "grid.collar_width");
    if (s.collar_width < 1) throw ValidationError("grid.collar_width", "must be >= 1");
  }
  if (j.contains("origin")) {
    axes(j["origin"], "grid.origin");
    for (std::size_t a = 0; a < d; ++a) s.origin[a] = number(j["origin"][a], "grid.origin");
  }
  return s;
}

SolverConfig solver_from_json(const json& j, SolverConfig c) {
  only_keys(j, "solver",
            {"max_iterations", "tolerance", "primal_step", "dual_step", "newton_tolerance", "check_interval",
             "accelerate", "restart_factor", "adaptive"});
  if (j.contains("max_iterations")) c.max_iterations = count(j["max_iterations"], "solver.max_iterations");
  if (j.contains("tolerance")) c.tolerance = number(j["tolerance"], "solver.tolerance");
  if (j.contains("primal_step")) c.primal_step = number(j["primal_step"], "solver.primal_step");
  if (j.contains("dual_step")) c.dual_step = number(j["dual_step"], "solver.dual_step");
  if (j.contains("newton_tolerance")) c.newton_tolerance = number(j["newton_tolerance"], "solver.newton_tolerance");
  if (j.contains("check_interval")) c.check_interval = count(j["check_interval"], "solver.check_interval");
  if (j.contains("accelerate")) c.accelerate = boolean(j["accelerate"], "solver.accelerate");
  if (j.contains("restart_factor")) c.restart_factor = number(j["restart_factor"], "solver.restart_factor");
  if (j.contains("adaptive")) c.adaptive = boolean(j["adaptive"], "solver.adaptive");
  return c;
}

json solver_to_json(const SolverConfig& c) {
  return json{{"max_iterations", c.max_iterations}, {"tolerance", c.tolerance},
              {"primal_step", c.primal_step},       {"dual_step", c.dual_step},
              {"newton_tolerance", c.newton_tolerance}, {"check_interval", c.check_interval},
              {"accelerate", c.accelerate},         {"restart_factor", c.restart_factor},
              {"adaptive", c.adaptive}};
}

json grid_to_json(const GridSpec& grid) {
  json g{{"dimension", grid.dimension}, {"spacing", grid.spacing}, {"collar_width", grid.collar_width}};
  if (grid.dimension == 1) {
    g["shape"] = {grid.shape[0]};
    g["origin"] = {grid.origin[0]};
  } else {
    g["shape"] = {grid.shape[0], grid.shape[1]};
    g["origin"] = {grid.origin[0], grid.origin[1]};
  }
  return g;
}

std::string to_string(Command c) {
  for (const auto& [name, cmd] : command_names()) {
    if (cmd == c) return name;
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  const auto it = command_names().find(s);
  if (it == command_names().end()) throw ValidationError("command", "unknown command \"" + s + "\"");
  return it->second;
}

bool Datum::time_dependent() const {
  const auto* e = std::get_if<Expression>(&value);
  return e && e->uses_time();
}

ScalarField Datum::realize(const Grid& grid, double t) const {
  if (const auto* c = std::get_if<double>(&value)) return ScalarField(grid, *c);
  if (const auto* csv = std::get_if<Csv>(&value)) return load_scalar_csv(csv->path, grid);
  if (const auto* raw = std::get_if<Raw>(&value)) return load_raw(raw->path, grid);
  const auto& e = std::get<Expression>(value);
  std::vector<double> v(grid.cell_count());
  for (std::size_t c = 0; c < v.size(); ++c) {
    const auto [i, j] = grid.cell_coords(c);
    const auto p = grid.sample_point(i, j);
    v[c] = e(p[0], p[1], t);
    if (!std::isfinite(v[c])) {
      throw InvalidArgument("expression \"" + e.text() + "\" is not finite at cell (" + std::to_string(i) +
                            ", " + std::to_string(j) + ")");
    }
  }
  return ScalarField(grid, std::move(v));
}

json Datum::to_json() const {
  if (const auto* c = std::get_if<double>(&value)) return *c;
  if (const auto* e = std::get_if<Expression>(&value)) return e->text();
  if (const auto* csv = std::get_if<Csv>(&value)) return json{{"csv", csv->path.string()}};
  return json{{"raw", std::get<Raw>(value).path.string()}};
}

void RunConfig::validate() const {
  const auto need = [](bool present, const std::string& key, const std::string& cmd) {
    if (!present) throw ValidationError(key, "required by command \"" + cmd + "\"");
  };
  const std::string cmd = to_string(command);
  const auto& keys = command_keys(command);
  const auto check = [&](bool present, const std::string& key) {
    if (present && !keys.contains(key)) {
      throw ValidationError(key, "not used by command \"" + cmd + "\"");
    }
  };
  check(mu.has_value(), "mu");
  check(lambda.has_value(), "lambda");
  check(source.has_value(), "source");
  check(boundary.has_value(), "boundary");
  check(initial.has_value(), "initial");
  check(tau.has_value(), "tau");
  check(horizon.has_value(), "horizon");
  check(!schedule.empty(), "schedule");
  check(!solution.empty(), "solution");

  try {
    (void)Grid::build(grid);
  } catch (const InvalidArgument& e) {
    throw ValidationError("grid", e.what());
  }
  const auto time_free = [&](const std::optional<Datum>& d, const std::string& key) {
    if (d && d->time_dependent()) throw ValidationError(key, "may depend on t only for command \"flow\"");
  };

  switch (command) {
    case Command::elliptic:
      need(mu.has_value(), "mu", cmd);
      need(lambda.has_value(), "lambda", cmd);
      need(source.has_value(), "source", cmd);
      need(boundary.has_value(), "boundary", cmd);
      if (*mu < 0.0) throw ValidationError("mu", "must be >= 0");
      if (*lambda < 0.0) throw ValidationError("lambda", "must be >= 0");
      break;
    case Command::tv:
      need(source.has_value(), "source", cmd);
      need(boundary.has_value(), "boundary", cmd);
      break;
    case Command::flow:
      need(boundary.has_value(), "boundary", cmd);
      need(initial.has_value(), "initial", cmd);
      need(tau.has_value(), "tau", cmd);
      need(horizon.has_value(), "horizon", cmd);
      if (!(*tau > 0.0)) throw ValidationError("tau", "must be positive");
      if (!(*horizon >= *tau)) throw ValidationError("horizon", "must be >= tau");
      if (initial->time_dependent()) throw ValidationError("initial", "may not depend on t");
      break;
    case Command::sweep:
      need(source.has_value(), "source", cmd);
      need(boundary.has_value(), "boundary", cmd);
      need(!schedule.empty(), "schedule", cmd);
      for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0 && schedule[i] < 1.0)) throw ValidationError("schedule", "entries must lie in (0, 1)");
        if (i > 0 && !(schedule[i] < schedule[i - 1])) {
          throw ValidationError("schedule", "must be strictly decreasing");
        }
      }
      break;
    case Command::verify:
      need(!solution.empty(), "solution", cmd);
      break;
    case Command::feasibility:
      need(source.has_value(), "source", cmd);
      break;
  }
  if (command != Command::flow) {
    time_free(source, "source");
    time_free(boundary, "boundary");
  }

  try {
    solver.validate(Grid::build(grid));
  } catch (const InvalidArgument& e) {
    throw ValidationError("solver", e.what());
  }
  if (!(verify.tolerance > 0.0)) throw ValidationError("verify.tolerance", "must be positive");
  if (!(verify.dissipation_tolerance > 0.0)) throw ValidationError("verify.dissipation_tolerance", "must be positive");
}

json RunConfig::to_json() const {
  json j;
  j["command"] = to_string(command);
  j["grid"] = grid_to_json(grid);
  if (mu) j["mu"] = *mu;
  if (lambda) j["lambda"] = *lambda;
  if (source) j["source"] = source->to_json();
  if (boundary) j["boundary"] = boundary->to_json();
  if (initial) j["initial"] = initial->to_json();
  if (tau) j["tau"] = *tau;
  if (horizon) j["horizon"] = *horizon;
  if (!schedule.empty()) j["schedule"] = schedule;
  j["solver"] = solver_to_json(solver);
  if (command == Command::flow || command == Command::verify) {
    j["verify"] = {{"tolerance", verify.tolerance}, {"dissipation_tolerance", verify.dissipation_tolerance}};
    j["comparisons"] = comparisons;
  }
  j["seed"] = seed;
  if (!output.empty()) j["output"] = output.string();
  if (!solution.empty()) j["solution"] = solution.string();
  j["dump_fields"] = dump_fields;
  return j;
}

RunConfig parse_config_json(const json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw ValidationError("config", "expected a JSON object");
  if (!j.contains("command")) throw ValidationError("command", "required");
  RunConfig c;
  c.command = command_from_string(text(j["command"], "command"));

  std::set<std::string> allowed = common_keys;
  allowed.insert({"mu", "lambda", "source", "boundary", "initial", "tau", "horizon", "schedule", "verify",
                  "comparisons", "solution"});
  only_keys(j, "", allowed);

  // verify reads the grid from the solution document.
  if (j.contains("grid")) {
    c.grid = grid_from_json(j["grid"]);
  } else if (c.command != Command::verify) {
    throw ValidationError("grid", "required");
  }
  if (j.contains("mu")) c.mu = number(j["mu"], "mu");
  if (j.contains("lambda")) c.lambda = number(j["lambda"], "lambda");
  if (j.contains("source")) c.source = datum(j["source"], "source", base);
  if (j.contains("boundary")) c.boundary = datum(j["boundary"], "boundary", base);
  if (j.contains("initial")) c.initial = datum(j["initial"], "initial", base);
  if (j.contains("tau")) c.tau = number(j["tau"], "tau");
  if (j.contains("horizon")) c.horizon = number(j["horizon"], "horizon");
  if (j.contains("schedule")) {
    if (!j["schedule"].is_array() || j["schedule"].empty()) {
      throw ValidationError("schedule", "expected a non-empty array");
    }
    for (const auto& v : j["schedule"]) c.schedule.push_back(number(v, "schedule"));
  }
  // Flow steps default to the tighter target of FlowConfig.
  if (c.command == Command::flow) c.solver = FlowConfig{}.solver;
  if (j.contains("solver")) c.solver = solver_from_json(j["solver"], c.solver);
  if (j.contains("verify")) {
    only_keys(j["verify"], "verify", {"tolerance", "dissipation_tolerance"});
    if (j["verify"].contains("tolerance")) c.verify.tolerance = number(j["verify"]["tolerance"], "verify.tolerance");
    if (j["verify"].contains("dissipation_tolerance")) {
      c.verify.dissipation_tolerance = number(j["verify"]["dissipation_tolerance"], "verify.dissipation_tolerance");
    }
  }
  if (j.contains("comparisons")) c.comparisons = count(j["comparisons"], "comparisons");
  if (j.contains("seed")) c.seed = count(j["seed"], "seed");
  if (j.contains("output")) c.output = resolve(base, text(j["output"], "output"));
  if (j.contains("solution")) c.solution = existing_file(base, j["solution"], "solution");
  if (j.contains("dump_fields")) c.dump_fields = boolean(j["dump_fields"], "dump_fields");
  c.validate();
  return c;
}

RunConfig parse_config_text(const std::string& s, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(s);
  } catch (const json::parse_error& e) {
    throw ParseError("", e.what());
  }
  return parse_config_json(j, base);
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot read config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
  return parse_config_json(j, path.parent_path());
}

const std::map<std::string, RunConfig>& problem_library() {
  static const std::map<std::string, RunConfig> library = [] {
    std::map<std::string, RunConfig> m;
    const auto line = [](int n, double origin) {
      GridSpec s;
      s.dimension = 1;
      s.shape = {n, 1};
      s.spacing = 1.0 / n;
      s.origin = {origin, 0.0};
      return s;
    };
    const auto expr = [](const char* s) { return Datum{Expression::parse(s)}; };

    RunConfig duality;
    duality.command = Command::tv;
    duality.grid = line(16, 0.0);
    duality.source = Datum{0.0};
    duality.boundary = expr("x");
    m["duality-linear-1d"] = duality;

    RunConfig area;
    area.command = Command::elliptic;
    area.grid = line(16, 0.0);
    area.mu = 1.0;
    area.lambda = 1.0;
    area.source = Datum{0.0};
    area.boundary = expr("x");
    m["area-linear-1d"] = area;

    RunConfig plateau;
    plateau.command = Command::flow;
    plateau.grid = line(32, 0.0);
    plateau.initial = expr("step(x-0.25)*step(0.75-x)");
    plateau.boundary = Datum{0.0};
    plateau.tau = 1e-3;
    plateau.horizon = 0.5;
    plateau.comparisons = 100;
    plateau.seed = 42;
    plateau.solver = FlowConfig{}.solver;
    m["plateau-decay-1d"] = plateau;

    RunConfig sweep;
    sweep.command = Command::sweep;
    sweep.grid = line(32, -0.5);
    sweep.source = Datum{0.0};
    sweep.boundary = expr("x");
    sweep.schedule = {0.5, 0.1, 0.02, 0.004};
    m["mu-sweep-default"] = sweep;

    RunConfig moving;
    moving.command = Command::flow;
    moving.grid = line(16, 0.0);
    moving.initial = expr("0.5*step(x-0.3)*step(0.7-x)");
    moving.boundary = expr("t*(1-x)");
    moving.tau = 0.01;
    moving.horizon = 0.1;
    moving.comparisons = 20;
    moving.seed = 7;
    moving.solver = FlowConfig{}.solver;
    m["moving-boundary-1d"] = moving;

    for (auto& [name, c] : m) c.validate();
    return m;
  }();
  return library;
}

RunConfig preset(const std::string& name) {
  const auto& lib = problem_library();
  const auto it = lib.find(name);
  if (it == lib.end()) throw ValidationError("preset", "unknown preset \"" + name + "\"");
  return it->second;
}

}  // namespace tvflow::harness
