#pragma once

#include <span>
#include <vector>

#include "bifree/extended_real.hpp"
#include "bifree/moments.hpp"

namespace bifree {

enum class Provenance { kOracle, kTransformed, kBound };

struct ChiValue {
  ExtendedReal value;
  Provenance provenance = Provenance::kOracle;
  /// Variable counts; -1 when unknown.
  int n = -1;
  int m = -1;
};

/// Determinants at or below this are treated as singular.
inline constexpr double kSingularDeterminant = 1e-12;
/// Relative eigenvalue tolerance for numerical rank.
inline constexpr double kRankTolerance = 1e-10;

/// ((n+m)/2) log(2 pi e) + (1/2) log det A, or -inf when det A <= 1e-12.
ChiValue gaussian_chi(const CovarianceSpec& cov);

/// chi + log|det Q| + log|det Rm|; -inf if either is singular.
ChiValue transform_chi(const ChiValue& chi, const RealMatrix& q, const RealMatrix& rm);

/// Shifting by constants leaves the entropy unchanged.
ChiValue shift_chi(const ChiValue& chi);

/// (k/2) log(2 pi e C^2 / k) with C^2 the sum of the k second moments.
ExtendedReal chi_upper_bound(std::span<const double> second_moments);

/// chi(block 1) + chi(block 2) - chi(joint); block 1 holds lefts 0..p-1 and
/// rights 0..q-1. +inf when the joint entropy is -inf and both blocks are finite.
double subadditivity_gap(const CovarianceSpec& cov, int p, int q);

/// Number of eigenvalues above kRankTolerance times the largest.
int gaussian_delta(const CovarianceSpec& cov);

/// gaussian_chi(A + eps I) through the eigenvalues, without the singular
/// cutoff: at small eps the determinant is legitimately below 1e-12.
double perturbed_gaussian_chi(const CovarianceSpec& cov, double eps);

/// n+m + least-squares slope of gaussian_chi(A + eps I) against |log sqrt(eps)|
/// over the grid. Needs >= 3 points spanning >= 2 decades.
double numeric_delta(const CovarianceSpec& cov, std::span<const double> eps_grid);

}  // namespace bifree
