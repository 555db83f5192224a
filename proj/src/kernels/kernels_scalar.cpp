#include "varlab/kernels.hpp"

namespace varlab::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_scaled(const double* a, double alpha, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + alpha * b[i];
}

double difference_dot(const double* u, const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  double sum = u[0] * v[0];
  for (std::size_t i = 1; i < n; ++i) sum += (u[i] - u[i - 1]) * (v[i] - v[i - 1]);
  sum += u[n - 1] * v[n - 1];
  return sum;
}

void second_difference(const double* u, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? u[i - 1] : 0.0;
    const double right = i + 1 < n ? u[i + 1] : 0.0;
    out[i] = 2.0 * u[i] - left - right;
  }
}

double cubic_potential_sum(const double* u, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = u[i] * u[i];
    sum += s * (0.5 - 0.25 * s);
  }
  return sum;
}

void cubic_force(const double* u, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = u[i] * (1.0 - u[i] * u[i]);
}

}  // namespace

const Table table{dot, axpy, add_scaled, difference_dot, second_difference, cubic_potential_sum, cubic_force};

}  // namespace varlab::kernels::scalar
