// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tvflow/harness/config.hpp"

// Dispatch of a RunConfig to the solvers and emission of its artifacts.
//
// With an output directory set, a run writes
//   certificate.json   the certificate document (deterministic bytes)
//   solution.json      fields and problem data, input of the verify command
//   series.csv         flow: one row per slice; sweep: one row per mu
//   fields/*.raw       with dump_fields
//
// verify reloads a solution.json and recomputes every certificate from the
// stored fields with the settings of the run that produced it.

namespace tvflow::harness {

enum ExitCode : int {
  exit_pass = 0,
  exit_certificate_failure = 2,
  exit_non_convergence = 3,
  exit_config_error = 4,
};

struct RunResult {
  int exit_code = exit_pass;
  /// One line per failed check; empty on success.
  std::vector<std::string> failures;
  json certificate;
  json solution;
};

/// Never throws for solver or data errors; they map to exit codes and failures.
/// Filesystem errors while writing artifacts propagate.
RunResult run(const RunConfig& config);

/// Re-validates a solution document written by run().
RunResult verify_solution(const json& solution);

/// Serializes with two-space indentation and a trailing newline.
std::string dump(const json& j);

}  // namespace tvflow::harness
