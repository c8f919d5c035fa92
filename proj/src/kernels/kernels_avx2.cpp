// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher.
#include "bifree/kernels.hpp"

#include <immintrin.h>

#include <cstddef>

namespace bifree::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + k), _mm256_loadu_pd(pb + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + k + 4), _mm256_loadu_pd(pb + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + k), _mm256_loadu_pd(pb + k), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += pa[k] * pb[k];
  return acc;
}

double sum_squares(std::span<const double> a) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    __m256d x0 = _mm256_loadu_pd(pa + k);
    __m256d x1 = _mm256_loadu_pd(pa + k + 4);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    acc1 = _mm256_fmadd_pd(x1, x1, acc1);
  }
  for (; k + 4 <= n; k += 4) {
    __m256d x0 = _mm256_loadu_pd(pa + k);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += pa[k] * pa[k];
  return acc;
}

std::complex<double> dotu(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b) {
  // Two complex numbers per register, interleaved (re, im, re, im).
  // re_acc collects (ar*br, ai*bi), im_acc collects (ar*bi, ai*br).
  const std::size_t n = a.size();
  const double* pa = reinterpret_cast<const double*>(a.data());
  const double* pb = reinterpret_cast<const double*>(b.data());
  __m256d re_acc = _mm256_setzero_pd();
  __m256d im_acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * k);
    __m256d vb = _mm256_loadu_pd(pb + 2 * k);
    __m256d vb_swapped = _mm256_permute_pd(vb, 0b0101);
    re_acc = _mm256_fmadd_pd(va, vb, re_acc);
    im_acc = _mm256_fmadd_pd(va, vb_swapped, im_acc);
  }
  alignas(32) double re_parts[4];
  alignas(32) double im_parts[4];
  _mm256_store_pd(re_parts, re_acc);
  _mm256_store_pd(im_parts, im_acc);
  double re = (re_parts[0] - re_parts[1]) + (re_parts[2] - re_parts[3]);
  double im = (im_parts[0] + im_parts[1]) + (im_parts[2] + im_parts[3]);
  for (; k < n; ++k) {
    re += a[k].real() * b[k].real() - a[k].imag() * b[k].imag();
    im += a[k].real() * b[k].imag() + a[k].imag() * b[k].real();
  }
  return {re, im};
}

}  // namespace bifree::kernels::avx2
