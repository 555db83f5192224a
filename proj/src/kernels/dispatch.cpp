#include <atomic>
#include <cstdlib>
#include <string>

#include "varlab/errors.hpp"
#include "varlab/kernels.hpp"

namespace varlab::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(VARLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  const char* env = std::getenv("VARLAB_SIMD");
  if (env != nullptr) {
    const std::string wanted(env);
    if (wanted == "scalar") return Isa::scalar;
    if (wanted == "avx2" && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

const Table& lookup([[maybe_unused]] Isa isa) {
#if defined(VARLAB_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::table;
#endif
  return scalar::table;
}

struct ActiveState {
  std::atomic<Isa> isa;
  std::atomic<const Table*> table;
  ActiveState() : isa(detect()), table(&lookup(isa.load())) {}
};

ActiveState& state() {
  static ActiveState s;
  return s;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
  }
  return false;
}

const Table& table_for(Isa isa) {
  require(available(isa), std::string("kernel variant unavailable: ") + std::string(to_string(isa)));
  return lookup(isa);
}

Isa active() { return state().isa.load(std::memory_order_relaxed); }

const Table& table() { return *state().table.load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  const Table& t = table_for(isa);
  state().isa.store(isa, std::memory_order_relaxed);
  state().table.store(&t, std::memory_order_relaxed);
}

}  // namespace varlab::kernels
