// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#define TVFLOW_AVX2 __attribute__((target("avx2")))

namespace tvflow::kernels {
namespace {

// Tails reuse the exact scalar expressions so results stay bit-identical.

TVFLOW_AVX2 double horizontal_sum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

TVFLOW_AVX2 void difference(const double* a, const double* b, double* out, std::size_t n,
                            double inv_h) {
  const __m256d s = _mm256_set1_pd(inv_h);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(a + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(d, s));
  }
  for (; i < n; ++i) out[i] = (b[i] - a[i]) * inv_h;
}

TVFLOW_AVX2 void difference_accumulate(const double* a, const double* b, double* out,
                                       std::size_t n, double inv_h) {
  const __m256d s = _mm256_set1_pd(inv_h);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(a + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), _mm256_mul_pd(d, s)));
  }
  for (; i < n; ++i) out[i] += (b[i] - a[i]) * inv_h;
}

TVFLOW_AVX2 void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                          _mm256_mul_pd(a, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

TVFLOW_AVX2 void clamp_unit(double* z, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d minus_one = _mm256_set1_pd(-1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(z + i);
    _mm256_storeu_pd(z + i, _mm256_min_pd(one, _mm256_max_pd(minus_one, v)));
  }
  for (; i < n; ++i) z[i] = std::min(1.0, std::max(-1.0, z[i]));
}

TVFLOW_AVX2 void project_disk(double* zx, double* zy, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(zx + i);
    const __m256d y = _mm256_loadu_pd(zy + i);
    const __m256d norm =
        _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)));
    const __m256d s = _mm256_div_pd(one, _mm256_max_pd(one, norm));
    _mm256_storeu_pd(zx + i, _mm256_mul_pd(x, s));
    _mm256_storeu_pd(zy + i, _mm256_mul_pd(y, s));
  }
  for (; i < n; ++i) {
    const double norm = std::sqrt(zx[i] * zx[i] + zy[i] * zy[i]);
    const double s = 1.0 / std::max(1.0, norm);
    zx[i] *= s;
    zy[i] *= s;
  }
}

TVFLOW_AVX2 void primal_step(double* u, double* u_bar, const double* div, const double* f,
                             std::size_t n, double tau, double scale, double theta) {
  const __m256d t = _mm256_set1_pd(tau);
  const __m256d s = _mm256_set1_pd(scale);
  const __m256d th = _mm256_set1_pd(theta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d old = _mm256_loadu_pd(u + i);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(div + i), _mm256_loadu_pd(f + i));
    const __m256d next = _mm256_mul_pd(_mm256_add_pd(old, _mm256_mul_pd(t, d)), s);
    _mm256_storeu_pd(u_bar + i, _mm256_add_pd(next, _mm256_mul_pd(th, _mm256_sub_pd(next, old))));
    _mm256_storeu_pd(u + i, next);
  }
  for (; i < n; ++i) {
    const double next = (u[i] + tau * (div[i] - f[i])) * scale;
    u_bar[i] = next + theta * (next - u[i]);
    u[i] = next;
  }
}

TVFLOW_AVX2 double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = horizontal_sum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

TVFLOW_AVX2 double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  double s = horizontal_sum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

TVFLOW_AVX2 double sum_abs(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  double s = horizontal_sum(acc);
  for (; i < n; ++i) s += std::abs(x[i]);
  return s;
}

TVFLOW_AVX2 double max_abs(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

TVFLOW_AVX2 double sum_hypot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x + i);
    const __m256d b = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b))));
  }
  double s = horizontal_sum(acc);
  for (; i < n; ++i) s += std::sqrt(x[i] * x[i] + y[i] * y[i]);
  return s;
}

TVFLOW_AVX2 double sum_area(const double* x, const double* y, std::size_t n, double mu) {
  const double mu2 = mu * mu;
  const __m256d m = _mm256_set1_pd(mu2);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  if (y == nullptr) {
    for (; i + 4 <= n; i += 4) {
      const __m256d a = _mm256_loadu_pd(x + i);
      acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_add_pd(m, _mm256_mul_pd(a, a))));
    }
    double s = horizontal_sum(acc);
    for (; i < n; ++i) s += std::sqrt(mu2 + x[i] * x[i]);
    return s;
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x + i);
    const __m256d b = _mm256_loadu_pd(y + i);
    const __m256d r = _mm256_add_pd(_mm256_add_pd(m, _mm256_mul_pd(a, a)), _mm256_mul_pd(b, b));
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(r));
  }
  double s = horizontal_sum(acc);
  for (; i < n; ++i) s += std::sqrt(mu2 + x[i] * x[i] + y[i] * y[i]);
  return s;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{
      "avx2",     difference, difference_accumulate, axpy,    clamp_unit, project_disk,
      primal_step, sum,       dot,                   sum_abs, max_abs,    sum_hypot,
      sum_area,
  };
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
}

}  // namespace tvflow::kernels

#else

namespace tvflow::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace tvflow::kernels

#endif
