#include <atomic>
#include <cstdlib>
#include <string>

#include "bifree/errors.hpp"
#include "bifree/kernels.hpp"

namespace bifree::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(BIFREE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("BIFREE_ISA")) {
    const std::string requested(env);
    if (requested == "scalar") return Isa::kScalar;
    if (requested == "avx2" && cpu_has_avx2()) return Isa::kAvx2;
  }
  return detected_isa();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Isa detected_isa() { return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  require(isa == Isa::kScalar || cpu_has_avx2(), "AVX2 kernels are not available on this CPU/build");
  current().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
#if defined(BIFREE_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::dot(a, b);
#endif
  return scalar::dot(a, b);
}

double sum_squares(std::span<const double> a) {
#if defined(BIFREE_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::sum_squares(a);
#endif
  return scalar::sum_squares(a);
}

std::complex<double> dotu(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b) {
  require(a.size() == b.size(), "dotu: length mismatch");
#if defined(BIFREE_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::dotu(a, b);
#endif
  return scalar::dotu(a, b);
}

}  // namespace bifree::kernels
