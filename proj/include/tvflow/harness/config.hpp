// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tvflow/elliptic.hpp"
#include "tvflow/error.hpp"
#include "tvflow/grid.hpp"
#include "tvflow/harness/expression.hpp"

// Run configuration. A config is one JSON object with a strict schema: keys
// not listed below, and keys the chosen command does not use, are errors.
//
//   command        elliptic | tv | flow | sweep | verify | feasibility
//   grid           {dimension, shape, spacing, collar_width = 1, origin = 0}; verify: unused
//   mu, lambda     elliptic
//   source         elliptic, tv, sweep, feasibility
//   boundary       elliptic, tv, sweep, flow (Dirichlet datum; may depend on t in flow)
//   initial        flow
//   tau, horizon   flow
//   schedule       sweep (strictly decreasing, in (0, 1))
//   solver         {max_iterations, tolerance, primal_step, dual_step, newton_tolerance,
//                   check_interval, accelerate, restart_factor, adaptive}
//   verify         {tolerance = 1e-6, dissipation_tolerance = 1e-8}   flow, verify
//   comparisons    flow, verify (default 100)
//   seed           default 0
//   output         output directory (optional; nothing is written without it)
//   solution       verify: path of a solution.json written by a previous run
//   dump_fields    write raw field dumps next to the certificate (default false)
//
// A datum is a number, an expression string, {"expr": "..."}, {"csv": path}
// or {"raw": path}. Paths are relative to the config file.

namespace tvflow::harness {

using nlohmann::json;

/// Malformed input: JSON syntax, unreadable or missing files, bad expressions.
class ParseError : public Error {
 public:
  ParseError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Well-formed input that violates the schema; field() names the offending key.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Command { elliptic, tv, flow, sweep, verify, feasibility };

std::string to_string(Command c);
/// Throws ValidationError naming "command".
Command command_from_string(const std::string& s);

struct Datum {
  struct Csv {
    std::filesystem::path path;
  };
  struct Raw {
    std::filesystem::path path;
  };
  std::variant<double, Expression, Csv, Raw> value = 0.0;

  bool time_dependent() const;
  /// Values on every padded cell; collar cells are sampled at the boundary trace.
  ScalarField realize(const Grid& grid, double t = 0.0) const;
  json to_json() const;
};

struct VerifySettings {
  double tolerance = 1e-6;
  double dissipation_tolerance = 1e-8;
};

struct RunConfig {
  Command command = Command::elliptic;
  GridSpec grid;
  std::optional<double> mu;
  std::optional<double> lambda;
  std::optional<Datum> source;
  std::optional<Datum> boundary;
  std::optional<Datum> initial;
  std::optional<double> tau;
  std::optional<double> horizon;
  std::vector<double> schedule;
  SolverConfig solver;
  VerifySettings verify;
  std::size_t comparisons = 100;
  std::uint64_t seed = 0;
  std::filesystem::path output;
  std::filesystem::path solution;
  bool dump_fields = false;

  /// Cross-field checks for the chosen command. Throws ValidationError.
  void validate() const;
  /// Canonical form, suitable for parse_config_json and for embedding in outputs.
  json to_json() const;
};

/// Reads and validates a config file. Throws ParseError or ValidationError.
RunConfig parse_config(const std::filesystem::path& path);
/// base_dir resolves relative data paths.
RunConfig parse_config_json(const json& j, const std::filesystem::path& base_dir = {});
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});

/// Pieces of the schema, shared with the solution documents. Throw ValidationError.
GridSpec grid_from_json(const json& j);
json grid_to_json(const GridSpec& grid);
SolverConfig solver_from_json(const json& j, SolverConfig base = {});
json solver_to_json(const SolverConfig& c);

/// Named presets used by the acceptance suite.
const std::map<std::string, RunConfig>& problem_library();
/// Throws ValidationError naming "preset".
RunConfig preset(const std::string& name);

}  // namespace tvflow::harness
