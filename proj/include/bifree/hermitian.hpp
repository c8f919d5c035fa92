#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace bifree {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Tolerance for accepting a matrix as self-adjoint after arithmetic.
inline constexpr double kHermitianTolerance = 1e-12;

/// A d x d complex self-adjoint matrix, the real d^2-dimensional space
/// M_d^sa with the Hilbert-Schmidt geometry <A, B> = Tr(B* A).
///
/// Stored entries are exactly self-adjoint: the constructor symmetrizes after
/// checking that the input is Hermitian to kHermitianTolerance (relative to
/// the largest entry).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(ComplexMatrix entries);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(std::span<const double> values);
  static HermitianMatrix from_real(const RealMatrix& symmetric);

  /// Inverse of coordinates(): an isometry R^{d^2} -> M_d^sa.
  static HermitianMatrix from_coordinates(int dim, std::span<const double> coords);

  /// Orthonormal coordinates: the d diagonal entries, then for each i < j
  /// sqrt(2) Re A_ij and sqrt(2) Im A_ij. Euclidean norm = HS norm.
  std::vector<double> coordinates() const;

  int dim() const { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const { return entries_; }
  Complex operator()(int i, int j) const { return entries_(i, j); }

  /// tau_d(A) = Tr(A) / d.
  double normalized_trace() const;
  double hs_norm() const;

  HermitianMatrix operator+(const HermitianMatrix& other) const;
  HermitianMatrix operator-(const HermitianMatrix& other) const;
  HermitianMatrix operator*(double scale) const;
  friend HermitianMatrix operator*(double scale, const HermitianMatrix& a) { return a * scale; }

  /// U* A U.
  HermitianMatrix conjugated_by(const class UnitaryMatrix& u) const;

  /// Entrywise transpose (= complex conjugate for Hermitian matrices).
  HermitianMatrix transposed() const;

  /// Eigenvalues in ascending order.
  RealVector eigenvalues() const;

 private:
  ComplexMatrix entries_;
};

/// A d x d unitary matrix. Construction checks U U* = I to 1e-10.
class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;
  explicit UnitaryMatrix(ComplexMatrix entries);

  static UnitaryMatrix identity(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const { return entries_; }

  /// max_ij |(U U*)_ij - delta_ij|.
  double unitarity_defect() const;

  UnitaryMatrix operator*(const UnitaryMatrix& other) const;

 private:
  ComplexMatrix entries_;
};

/// Tr(B* A) = d tau_d(BA); the real inner product of M_d^sa.
double hs_inner(const HermitianMatrix& a, const HermitianMatrix& b);

/// Largest absolute eigenvalue.
double operator_norm(const HermitianMatrix& a);

/// Tr(X Y) for arbitrary square complex matrices of equal size, in O(d^2).
Complex trace_of_product(const ComplexMatrix& x, const ComplexMatrix& y);

}  // namespace bifree
