// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

// tvflow <command> (--config <path> | --preset <name>) [--out <dir>] [--seed <int>] [--tolerance <float>]
//
// Exit codes: 0 pass, 2 certificate failure, 3 solver non-convergence, 4 config error.

#include <CLI11.hpp>

#include <iostream>

#include "tvflow/harness/run.hpp"

using namespace tvflow::harness;

int main(int argc, char** argv) {
  CLI::App app{"Certified solvers for total variation problems and flows"};
  app.require_subcommand(0, 1);

  std::string command;
  std::string config_path;
  std::string preset_name;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  bool list = false;

  app.add_option("command", command, "elliptic | tv | flow | sweep | verify | feasibility");
  auto* cfg_opt = app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--preset", preset_name, "named problem from the library")->excludes(cfg_opt);
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "seed for the comparison families");
  app.add_option("--tolerance", tolerance, "solver gap tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--list-presets", list, "print the preset names and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& [name, c] : problem_library()) std::cout << name << "  (" << to_string(c.command) << ")\n";
    return exit_pass;
  }

  RunConfig cfg;
  try {
    if (!preset_name.empty()) {
      cfg = preset(preset_name);
    } else if (!config_path.empty()) {
      cfg = parse_config(config_path);
    } else {
      std::cerr << "error: one of --config or --preset is required\n";
      return exit_config_error;
    }
    if (!command.empty() && command_from_string(command) != cfg.command) {
      throw ValidationError("command", "command line says \"" + command + "\" but the config says \"" +
                                           to_string(cfg.command) + "\"");
    }
    if (!out.empty()) cfg.output = out;
    if (seed) cfg.seed = *seed;
    if (tolerance) cfg.solver.tolerance = *tolerance;
    cfg.validate();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return exit_config_error;
  }

  RunResult r;
  try {
    r = run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config_error;
  }
  for (const auto& f : r.failures) std::cerr << "FAILED " << f << "\n";
  if (cfg.output.empty() && !r.certificate.is_null()) std::cout << dump(r.certificate);
  return r.exit_code;
}
