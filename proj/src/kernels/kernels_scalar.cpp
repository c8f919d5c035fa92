#include "bifree/kernels.hpp"

#include <cstddef>

namespace bifree::kernels::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double sum_squares(std::span<const double> a) {
  double acc = 0.0;
  for (double x : a) acc += x * x;
  return acc;
}

std::complex<double> dotu(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    re += a[k].real() * b[k].real() - a[k].imag() * b[k].imag();
    im += a[k].real() * b[k].imag() + a[k].imag() * b[k].real();
  }
  return {re, im};
}

}  // namespace bifree::kernels::scalar
