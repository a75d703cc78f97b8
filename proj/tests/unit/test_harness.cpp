// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "support/fixtures.hpp"
#include "tvflow/field_io.hpp"
#include "tvflow/harness/config.hpp"
#include "tvflow/harness/run.hpp"

using namespace tvflow;
using namespace tvflow::harness;
namespace fs = std::filesystem;

namespace {

// Scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("tvflow_test_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kMinimal = R"j({
  "command": "elliptic",
  "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
  "mu": 1, "lambda": 1, "source": 0, "boundary": "x"
})j";

// A sweep small enough for unit tests; the preset itself runs in the acceptance suite.
RunConfig small_sweep() {
  RunConfig c = preset("mu-sweep-default");
  c.grid.shape = {8, 1};
  c.grid.spacing = 0.125;
  c.schedule = {0.5, 0.1};
  return c;
}

std::string field_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal elliptic config") {
  const RunConfig c = parse_config_text(kMinimal);
  CHECK(c.command == Command::elliptic);
  CHECK(c.grid.shape[0] == 8);
  CHECK(c.grid.collar_width == 1);
  CHECK(*c.mu == 1.0);
  CHECK(*c.lambda == 1.0);
  const Grid g = Grid::build(c.grid);
  const ScalarField u0 = c.boundary->realize(g);
  CHECK(u0.at(-1) == 0.0);
  CHECK(u0.at(8) == 1.0);
  CHECK(u0.at(3) == doctest::Approx(3.5 / 8));
  CHECK(interior_sup(c.source->realize(g)) == 0.0);
}

TEST_CASE("strict schema names the offending key") {
  CHECK(field_of(R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                     "source": 0, "boundary": "x", "nu": 1})j") == "nu");
  CHECK(field_of(R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125, "cells": 3},
                     "source": 0, "boundary": "x"})j") == "grid.cells");
  CHECK(field_of(R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                     "source": 0, "boundary": "x", "mu": 0})j") == "mu");
  CHECK(field_of(R"j({"command": "elliptic", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                     "mu": 1, "source": 0, "boundary": "x"})j") == "lambda");
  CHECK(field_of(R"j({"command": "flow", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                     "initial": 0, "boundary": 0, "tau": -1, "horizon": 1})j") == "tau");
  CHECK(field_of(R"j({"command": "sweep", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                     "source": 0, "boundary": "x", "schedule": [0.1, 0.5]})j") == "schedule");
  CHECK(field_of(R"j({"command": "bogus", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125}})j") == "command");
  CHECK(field_of(R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8, 2], "spacing": 0.125},
                     "source": 0, "boundary": "x"})j") == "grid.shape");
  CHECK(field_of(R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                     "source": 0, "boundary": "t"})j") == "boundary");
  CHECK(field_of(R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                     "source": 0, "boundary": "x", "solver": {"tolerance": 0}})j") == "solver");
  CHECK(field_of(R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                     "source": 0, "boundary": "x", "solver": {"speed": 2}})j") == "solver.speed");
  CHECK(field_of(R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8]},
                     "source": 0, "boundary": "x"})j") == "grid.spacing");
}

TEST_CASE("parse errors carry the path or position") {
  TempDir dir("parse");
  const fs::path cfg = dir.path / "c.json";
  std::ofstream(cfg) << R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                            "source": {"csv": "missing.csv"}, "boundary": "x"})j";
  try {
    parse_config(cfg);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
    CHECK(e.where() == "source.csv");
  }
  CHECK_THROWS_AS(parse_config_text("{\"command\": \"tv\",\n"), ParseError);
  try {
    parse_config_text("{\"command\": \"tv\",\n  oops}");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text(R"j({"command": "tv", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
                                         "source": "sin(x)", "boundary": "x"})j"),
                  ParseError);
  CHECK_THROWS_AS(parse_config(dir.path / "absent.json"), ParseError);
}

TEST_CASE("csv and raw data resolve relative to the config") {
  TempDir dir("data");
  const Grid g = fixtures::line(4, 0.25);
  const ScalarField b = fixtures::tabulate(g, [](int i, int) { return 0.1 * i; });
  save_csv(dir.path / "b.csv", b);
  save_raw(dir.path / "b.raw", b);
  for (const char* kind : {"csv", "raw"}) {
    const json j{{"command", "tv"},
                 {"grid", {{"dimension", 1}, {"shape", {4}}, {"spacing", 0.25}}},
                 {"source", 0},
                 {"boundary", {{kind, std::string("b.") + kind}}}};
    std::ofstream(dir.path / "c.json") << j.dump();
    const RunConfig c = parse_config(dir.path / "c.json");
    const ScalarField r = c.boundary->realize(g);
    CHECK(std::equal(r.values().begin(), r.values().end(), b.values().begin()));
  }
}

TEST_CASE("config round-trips through its canonical JSON") {
  for (const auto& [name, c] : problem_library()) {
    CAPTURE(name);
    const json j = c.to_json();
    CHECK(parse_config_json(j).to_json() == j);
  }
}

TEST_CASE("presets") {
  const RunConfig d = preset("duality-linear-1d");
  CHECK(d.command == Command::tv);
  CHECK(d.grid.shape[0] == 16);
  const RunConfig p = preset("plateau-decay-1d");
  CHECK(p.command == Command::flow);
  CHECK(p.grid.shape[0] == 32);
  CHECK(*p.tau == 1e-3);
  CHECK(*p.horizon == 0.5);
  CHECK(p.comparisons == 100);
  CHECK(p.seed == 42);
  const RunConfig s = preset("mu-sweep-default");
  CHECK(s.schedule == std::vector<double>{0.5, 0.1, 0.02, 0.004});
  CHECK_THROWS_AS(preset("nope"), ValidationError);
}

TEST_CASE("tv command on the linear datum") {
  RunConfig c = preset("duality-linear-1d");
  const RunResult r = run(c);
  CHECK(r.exit_code == exit_pass);
  CHECK(r.certificate["primal_value"].get<double>() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.certificate["dual_value"].get<double>() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.certificate["seed"] == 0);
}

TEST_CASE("flow command on zero data") {
  RunConfig c = parse_config_text(R"j({"command": "flow", "grid": {"dimension": 1, "shape": [8], "spacing": 0.125},
      "initial": 0, "boundary": 0, "tau": 0.01, "horizon": 0.05, "comparisons": 5})j");
  TempDir dir("zero");
  c.output = dir.path;
  const RunResult r = run(c);
  CHECK(r.exit_code == exit_pass);
  CHECK(r.certificate["slices"].size() == 5);
  for (const auto& s : r.certificate["slices"]) {
    CHECK(s["tv_value"] == 0.0);
    CHECK(s["l2_step"] == 0.0);
    CHECK(s["maximal_pairing_residual"] == 0.0);
  }
  CHECK(fs::exists(dir.path / "series.csv"));
  CHECK(slurp(dir.path / "series.csv").rfind("# seed 0\n", 0) == 0);
}

TEST_CASE("unbounded source is reported, not clamped") {
  const RunResult r = run(parse_config_text(R"j({"command": "tv",
      "grid": {"dimension": 1, "shape": [8], "spacing": 0.125}, "source": 5, "boundary": 0})j"));
  CHECK(r.exit_code == exit_certificate_failure);
  CHECK(r.certificate["status"] == "unbounded_below");
  CHECK(r.certificate["dual_norm_lower_bound"].get<double>() > 1.0);
}

TEST_CASE("non-convergence maps to exit 3") {
  RunConfig c = parse_config_text(kMinimal);
  c.solver.max_iterations = 3;
  c.solver.check_interval = 1;
  const RunResult r = run(c);
  CHECK(r.exit_code == exit_non_convergence);
  CHECK(r.certificate["status"] == "non_convergence");
}

TEST_CASE("verify re-validates emitted solutions and rejects a corrupted one") {
  TempDir dir("verify");
  for (const char* name : {"area-linear-1d", "mu-sweep", "moving-boundary-1d"}) {
    CAPTURE(name);
    RunConfig c = std::string(name) == "mu-sweep" ? small_sweep() : preset(name);
    c.output = dir.path / name;
    REQUIRE(run(c).exit_code == exit_pass);
    const json s = json::parse(slurp(c.output / "solution.json"));
    CHECK(verify_solution(s).exit_code == exit_pass);
  }

  RunConfig c = parse_config_text(R"j({"command": "flow", "grid": {"dimension": 1, "shape": [16], "spacing": 0.0625},
      "initial": "step(x-0.25)*step(0.75-x)", "boundary": 0, "tau": 0.01, "horizon": 0.05, "comparisons": 10})j");
  c.output = dir.path / "flow";
  REQUIRE(run(c).exit_code == exit_pass);
  json s = json::parse(slurp(c.output / "solution.json"));
  CHECK(verify_solution(s).exit_code == exit_pass);
  for (auto& z : s["slices"][2]["z"]) z = 0.0;
  const RunResult bad = verify_solution(s);
  CHECK(bad.exit_code == exit_certificate_failure);
  bool listed = false;
  for (const auto& f : bad.failures) listed |= f.find("slice 2: maximal_pairing") != std::string::npos;
  CHECK(listed);

  // Through a config file, as the CLI does.
  std::ofstream(dir.path / "v.json") << R"j({"command": "verify", "solution": "flow/solution.json"})j";
  CHECK(run(parse_config(dir.path / "v.json")).exit_code == exit_pass);

  json broken = s;
  broken.erase("kind");
  CHECK(verify_solution(broken).exit_code == exit_config_error);
}

TEST_CASE("identical config and seed give identical bytes") {
  TempDir dir("determinism");
  for (const char* name : {"moving-boundary-1d", "mu-sweep"}) {
    RunConfig a = std::string(name) == "mu-sweep" ? small_sweep() : preset(name);
    a.output = dir.path / "a" / name;
    RunConfig b = a;
    b.output = dir.path / "b" / name;
    REQUIRE(run(a).exit_code == exit_pass);
    REQUIRE(run(b).exit_code == exit_pass);
    CHECK(slurp(a.output / "certificate.json") == slurp(b.output / "certificate.json"));
    CHECK(slurp(a.output / "solution.json") == slurp(b.output / "solution.json"));
  }
}

TEST_CASE("field dumps") {
  TempDir dir("dump");
  RunConfig c = preset("area-linear-1d");
  c.output = dir.path;
  c.dump_fields = true;
  REQUIRE(run(c).exit_code == exit_pass);
  const ScalarField u = load_raw(dir.path / "fields" / "u.raw", Grid::build(c.grid));
  const json s = json::parse(slurp(dir.path / "solution.json"));
  CHECK(u.at(3) == s["u"][4].get<double>());
}

TEST_CASE("feasibility command") {
  const RunResult r = run(parse_config_text(R"j({"command": "feasibility",
      "grid": {"dimension": 2, "shape": [4, 4], "spacing": 0.25}, "source": "step(x-0.5)-0.5"})j"));
  CHECK(r.exit_code == exit_pass);
  CHECK(r.certificate["lower_bound"].get<double>() <= r.certificate["optimum"].get<double>() + 1e-8);
}
