#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64 builds, an AVX2/FMA version. The active variant is chosen once at
// startup from CPUID and can be pinned with VARLAB_SIMD=scalar|avx2.
//
// The variants are not bitwise identical: wide kernels reassociate sums.
// tests/test_kernels.cpp bounds the difference.

#include <cstddef>
#include <span>
#include <string_view>

namespace varlab::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct Table {
  // sum_i a_i b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y_i += alpha x_i
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out_i = a_i + alpha b_i
  void (*add_scaled)(const double* a, double alpha, const double* b, double* out, std::size_t n);
  // sum_{i=0}^{n} (u_{i+1}-u_i)(v_{i+1}-v_i) with u_0 = u_{n+1} = 0 (same for v)
  double (*difference_dot)(const double* u, const double* v, std::size_t n);
  // out_i = 2u_i - u_{i-1} - u_{i+1}, zero Dirichlet padding
  void (*second_difference)(const double* u, double* out, std::size_t n);
  // sum_i (u_i^2/2 - u_i^4/4)
  double (*cubic_potential_sum)(const double* u, std::size_t n);
  // out_i = u_i - u_i^3
  void (*cubic_force)(const double* u, double* out, std::size_t n);
};

bool available(Isa isa);
const Table& table_for(Isa isa);

// Variant used by the library.
Isa active();
const Table& table();

// Pins the active variant; throws if the ISA is unavailable. For tests and
// the --simd escape hatch.
void set_active(Isa isa);

namespace scalar {
extern const Table table;
}
#if defined(VARLAB_HAVE_AVX2)
namespace avx2 {
extern const Table table;
}
#endif

inline double dot(std::span<const double> a, std::span<const double> b) {
  return table().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  table().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace varlab::kernels
