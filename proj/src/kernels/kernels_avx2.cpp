// Compiled with -mavx2 -mfma. Only reached after a CPUID check in dispatch.cpp.

#include <immintrin.h>

#include "varlab/kernels.hpp"

namespace varlab::kernels::avx2 {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_scaled(const double* a, double alpha, const double* b, double* out, std::size_t n) {
  const __m256d s = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(s, _mm256_loadu_pd(b + i), _mm256_loadu_pd(a + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + alpha * b[i];
}

double difference_dot(const double* u, const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  double sum = u[0] * v[0] + u[n - 1] * v[n - 1];
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 1;
  for (; i + 4 <= n; i += 4) {
    const __m256d du = _mm256_sub_pd(_mm256_loadu_pd(u + i), _mm256_loadu_pd(u + i - 1));
    const __m256d dv = _mm256_sub_pd(_mm256_loadu_pd(v + i), _mm256_loadu_pd(v + i - 1));
    acc = _mm256_fmadd_pd(du, dv, acc);
  }
  sum += horizontal_sum(acc);
  for (; i < n; ++i) sum += (u[i] - u[i - 1]) * (v[i] - v[i - 1]);
  return sum;
}

void second_difference(const double* u, double* out, std::size_t n) {
  if (n < 3) {
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? u[i - 1] : 0.0;
      const double right = i + 1 < n ? u[i + 1] : 0.0;
      out[i] = 2.0 * u[i] - left - right;
    }
    return;
  }
  out[0] = 2.0 * u[0] - u[1];
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d centre = _mm256_loadu_pd(u + i);
    const __m256d sides = _mm256_add_pd(_mm256_loadu_pd(u + i - 1), _mm256_loadu_pd(u + i + 1));
    _mm256_storeu_pd(out + i, _mm256_fmsub_pd(two, centre, sides));
  }
  for (; i < n - 1; ++i) out[i] = 2.0 * u[i] - u[i - 1] - u[i + 1];
  out[n - 1] = 2.0 * u[n - 1] - u[n - 2];
}

double cubic_potential_sum(const double* u, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d quarter = _mm256_set1_pd(0.25);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(u + i);
    const __m256d s = _mm256_mul_pd(x, x);
    acc = _mm256_fmadd_pd(s, _mm256_fnmadd_pd(quarter, s, half), acc);
  }
  double sum = horizontal_sum(acc);
  for (; i < n; ++i) {
    const double s = u[i] * u[i];
    sum += s * (0.5 - 0.25 * s);
  }
  return sum;
}

void cubic_force(const double* u, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(u + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(x, _mm256_fnmadd_pd(x, x, one)));
  }
  for (; i < n; ++i) out[i] = u[i] * (1.0 - u[i] * u[i]);
}

}  // namespace

const Table table{dot, axpy, add_scaled, difference_dot, second_difference, cubic_potential_sum, cubic_force};

}  // namespace varlab::kernels::avx2
