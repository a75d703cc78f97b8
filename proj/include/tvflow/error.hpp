// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violation on an argument (bad shape, negative parameter, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields that must share a grid do not.
class GridMismatch : public InvalidArgument {
 public:
  GridMismatch() : InvalidArgument("fields are defined on different grids") {}
};

/// The iterative solver stopped at max_iterations without meeting the gap target.
class NonConvergence : public Error {
 public:
  NonConvergence(std::size_t iterations, double last_gap, const std::string& what)
      : Error(what), iterations_(iterations), last_gap_(last_gap) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double last_gap() const noexcept { return last_gap_; }

 private:
  std::size_t iterations_;
  double last_gap_;
};

/// The primal objective has no lower bound (source outside the dual unit ball).
class UnboundedBelow : public Error {
 public:
  UnboundedBelow(double dual_norm_lower_bound, const std::string& what)
      : Error(what), dual_norm_lower_bound_(dual_norm_lower_bound) {}

  /// Certified lower bound on min ||z||_inf subject to div z = f.
  double dual_norm_lower_bound() const noexcept { return dual_norm_lower_bound_; }

 private:
  double dual_norm_lower_bound_;
};

}  // namespace tvflow
