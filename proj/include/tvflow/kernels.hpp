// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

// Inner-loop arithmetic shared by the grid operators, the energies and the
// primal-dual solver. Every kernel has a scalar reference implementation; an
// AVX2 variant is compiled on x86-64 and picked at runtime when the CPU
// supports it. Elementwise kernels are bit-identical across variants (no FMA
// contraction); reductions differ only in summation order.

namespace tvflow::kernels {

struct KernelTable {
  const char* name;

  // out[i] = (b[i] - a[i]) * inv_h
  void (*difference)(const double* a, const double* b, double* out, std::size_t n, double inv_h);
  // out[i] += (b[i] - a[i]) * inv_h
  void (*difference_accumulate)(const double* a, const double* b, double* out, std::size_t n,
                                double inv_h);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // z[i] = clamp(z[i], -1, 1)
  void (*clamp_unit)(double* z, std::size_t n);
  // (zx[i], zy[i]) /= max(1, |(zx[i], zy[i])|)
  void (*project_disk)(double* zx, double* zy, std::size_t n);
  // u' = (u + tau (div - f)) * scale;  u_bar = u' + theta (u' - u);  u = u'
  void (*primal_step)(double* u, double* u_bar, const double* div, const double* f, std::size_t n,
                      double tau, double scale, double theta);

  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum_abs)(const double* x, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  // sum_i sqrt(x[i]^2 + y[i]^2)
  double (*sum_hypot)(const double* x, const double* y, std::size_t n);
  // sum_i sqrt(mu^2 + x[i]^2 + y[i]^2); y may be null
  double (*sum_area)(const double* x, const double* y, std::size_t n, double mu);
};

const KernelTable& scalar_table();

/// AVX2 table, or nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_table();

/// Table used by the library. Chosen on first use from TVFLOW_KERNELS
/// ("scalar", "avx2", "auto"; default auto).
const KernelTable& active();

/// Force a variant ("scalar", "avx2" or "auto"). Returns false if unavailable.
bool select(std::string_view name);

}  // namespace tvflow::kernels
