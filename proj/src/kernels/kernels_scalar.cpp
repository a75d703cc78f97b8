// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "tvflow/kernels.hpp"

namespace tvflow::kernels {
namespace {

void difference(const double* a, const double* b, double* out, std::size_t n, double inv_h) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (b[i] - a[i]) * inv_h;
}

void difference_accumulate(const double* a, const double* b, double* out, std::size_t n,
                           double inv_h) {
  for (std::size_t i = 0; i < n; ++i) out[i] += (b[i] - a[i]) * inv_h;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void clamp_unit(double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = std::min(1.0, std::max(-1.0, z[i]));
}

void project_disk(double* zx, double* zy, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = std::sqrt(zx[i] * zx[i] + zy[i] * zy[i]);
    const double s = 1.0 / std::max(1.0, norm);
    zx[i] *= s;
    zy[i] *= s;
  }
}

void primal_step(double* u, double* u_bar, const double* div, const double* f, std::size_t n,
                 double tau, double scale, double theta) {
  for (std::size_t i = 0; i < n; ++i) {
    const double next = (u[i] + tau * (div[i] - f[i])) * scale;
    u_bar[i] = next + theta * (next - u[i]);
    u[i] = next;
  }
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_abs(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(x[i]);
  return s;
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double sum_hypot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::sqrt(x[i] * x[i] + y[i] * y[i]);
  return s;
}

double sum_area(const double* x, const double* y, std::size_t n, double mu) {
  const double mu2 = mu * mu;
  double s = 0.0;
  if (y == nullptr) {
    for (std::size_t i = 0; i < n; ++i) s += std::sqrt(mu2 + x[i] * x[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) s += std::sqrt(mu2 + x[i] * x[i] + y[i] * y[i]);
  }
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",   difference, difference_accumulate, axpy,    clamp_unit, project_disk,
      primal_step, sum,       dot,                   sum_abs, max_abs,    sum_hypot,
      sum_area,
  };
  return table;
}

}  // namespace tvflow::kernels
