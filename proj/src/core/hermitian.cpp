#include "bifree/hermitian.hpp"

#include <algorithm>
#include <cmath>

#include "bifree/errors.hpp"
#include "bifree/kernels.hpp"

namespace bifree {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

std::span<const double> as_reals(const ComplexMatrix& m) {
  return {reinterpret_cast<const double*>(m.data()), static_cast<std::size_t>(2 * m.size())};
}

}  // namespace

HermitianMatrix::HermitianMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
  require(entries_.rows() == entries_.cols(), "Hermitian matrix must be square");
  require(entries_.rows() >= 1, "Hermitian matrix must have dimension >= 1");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  const double defect = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  require(defect <= kHermitianTolerance * scale, "matrix is not self-adjoint");
  ComplexMatrix sym = (entries_ + entries_.adjoint()) * 0.5;
  entries_ = std::move(sym);
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  require(dim >= 1, "dimension must be >= 1");
  return HermitianMatrix(ComplexMatrix::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  require(dim >= 1, "dimension must be >= 1");
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  require(!values.empty(), "diagonal needs at least one entry");
  const int d = static_cast<int>(values.size());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = values[static_cast<std::size_t>(i)];
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::from_real(const RealMatrix& symmetric) {
  return HermitianMatrix(symmetric.cast<Complex>());
}

HermitianMatrix HermitianMatrix::from_coordinates(int dim, std::span<const double> coords) {
  require(dim >= 1, "dimension must be >= 1");
  require(coords.size() == static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim),
          "coordinate vector must have d^2 entries");
  HermitianMatrix out;
  out.entries_.resize(dim, dim);
  std::size_t k = 0;
  for (int i = 0; i < dim; ++i) out.entries_(i, i) = coords[k++];
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const Complex z(coords[k] / kSqrt2, coords[k + 1] / kSqrt2);
      k += 2;
      out.entries_(i, j) = z;
      out.entries_(j, i) = std::conj(z);
    }
  }
  return out;
}

std::vector<double> HermitianMatrix::coordinates() const {
  const int d = dim();
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) coords.push_back(entries_(i, i).real());
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      coords.push_back(kSqrt2 * entries_(i, j).real());
      coords.push_back(kSqrt2 * entries_(i, j).imag());
    }
  }
  return coords;
}

double HermitianMatrix::normalized_trace() const { return entries_.trace().real() / dim(); }

double HermitianMatrix::hs_norm() const { return std::sqrt(kernels::sum_squares(as_reals(entries_))); }

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
  require(dim() == other.dim(), "dimension mismatch");
  HermitianMatrix out;
  out.entries_ = entries_ + other.entries_;
  return out;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
  require(dim() == other.dim(), "dimension mismatch");
  HermitianMatrix out;
  out.entries_ = entries_ - other.entries_;
  return out;
}

HermitianMatrix HermitianMatrix::operator*(double scale) const {
  HermitianMatrix out;
  out.entries_ = entries_ * scale;
  return out;
}

HermitianMatrix HermitianMatrix::conjugated_by(const UnitaryMatrix& u) const {
  require(dim() == u.dim(), "dimension mismatch");
  ComplexMatrix c = u.entries().adjoint() * entries_ * u.entries();
  HermitianMatrix out;
  out.entries_ = (c + c.adjoint()) * 0.5;
  return out;
}

HermitianMatrix HermitianMatrix::transposed() const {
  HermitianMatrix out;
  out.entries_ = entries_.transpose();
  return out;
}

RealVector HermitianMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(entries_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
  require(entries_.rows() == entries_.cols() && entries_.rows() >= 1, "unitary matrix must be square, d >= 1");
  require(unitarity_defect() < 1e-10, "matrix is not unitary");
}

UnitaryMatrix UnitaryMatrix::identity(int dim) { return UnitaryMatrix(ComplexMatrix::Identity(dim, dim)); }

double UnitaryMatrix::unitarity_defect() const {
  const ComplexMatrix g = entries_ * entries_.adjoint() - ComplexMatrix::Identity(dim(), dim());
  return g.cwiseAbs().maxCoeff();
}

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& other) const {
  require(dim() == other.dim(), "dimension mismatch");
  return UnitaryMatrix(entries_ * other.entries_);
}

double hs_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  require(a.dim() == b.dim(), "hs_inner: dimension mismatch");
  // Re sum_ij A_ij conj(B_ij) is the real dot product of the interleaved storage.
  return kernels::dot(as_reals(a.entries()), as_reals(b.entries()));
}

double operator_norm(const HermitianMatrix& a) {
  const RealVector ev = a.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

Complex trace_of_product(const ComplexMatrix& x, const ComplexMatrix& y) {
  require(x.rows() == x.cols() && y.rows() == y.cols() && x.rows() == y.rows(),
          "trace_of_product: dimension mismatch");
  // Tr(XY) = sum_ij X_ij Y_ji; with column-major storage, X and Y^T line up.
  const ComplexMatrix yt = y.transpose();
  return kernels::dotu({x.data(), static_cast<std::size_t>(x.size())},
                       {yt.data(), static_cast<std::size_t>(yt.size())});
}

}  // namespace bifree
