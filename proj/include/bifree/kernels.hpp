#pragma once

#include <complex>
#include <span>
#include <string_view>

// Inner-loop arithmetic shared by the matrix layer. Every kernel has a scalar
// reference implementation; an AVX2+FMA variant is selected at runtime when
// the CPU supports it. Variants agree to rounding (summation order differs).

namespace bifree::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

/// Best ISA supported by the running CPU and compiled into this build.
Isa detected_isa();

/// ISA currently used by the dispatching entry points below. Defaults to
/// detected_isa(), or to the value of the BIFREE_ISA environment variable
/// ("scalar" / "avx2") when set.
Isa active_isa();

/// Forces a variant; throws InvalidArgument if it is not available.
void set_active_isa(Isa isa);

/// Sum_k a[k] * b[k].
double dot(std::span<const double> a, std::span<const double> b);

/// Sum_k a[k]^2.
double sum_squares(std::span<const double> a);

/// Unconjugated complex dot product Sum_k a[k] * b[k].
std::complex<double> dotu(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
std::complex<double> dotu(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b);
}  // namespace scalar

#if defined(BIFREE_HAVE_AVX2)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
std::complex<double> dotu(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b);
}  // namespace avx2
#endif

}  // namespace bifree::kernels
