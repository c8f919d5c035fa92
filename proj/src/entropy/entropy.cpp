#include "bifree/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "bifree/errors.hpp"

namespace bifree {
namespace {

const double kLog2PiE = std::log(2.0 * std::numbers::pi * std::numbers::e);

double log_abs_det(const RealMatrix& a) {
  if (a.rows() == 0) return 0.0;
  return std::log(std::abs(a.determinant()));
}

}  // namespace

ChiValue gaussian_chi(const CovarianceSpec& cov) {
  const RealMatrix& a = cov.matrix();
  const double det = a.determinant();
  if (det <= kSingularDeterminant) return {ExtendedReal::neg_infinity(), Provenance::kOracle, cov.n(), cov.m()};
  return {0.5 * cov.size() * kLog2PiE + 0.5 * std::log(det), Provenance::kOracle, cov.n(), cov.m()};
}

ChiValue transform_chi(const ChiValue& chi, const RealMatrix& q, const RealMatrix& rm) {
  require(q.rows() == q.cols(), "Q must be square");
  require(rm.rows() == rm.cols(), "Rm must be square");
  require(chi.n < 0 || q.rows() == chi.n, "Q must be n x n");
  require(chi.m < 0 || rm.rows() == chi.m, "Rm must be m x m");
  const int n = static_cast<int>(q.rows()), m = static_cast<int>(rm.rows());
  if (chi.value.is_neg_infinity()) return {ExtendedReal::neg_infinity(), Provenance::kTransformed, n, m};
  const double dq = q.rows() > 0 ? q.determinant() : 1.0;
  const double dr = rm.rows() > 0 ? rm.determinant() : 1.0;
  if (std::abs(dq) <= kSingularDeterminant || std::abs(dr) <= kSingularDeterminant) {
    return {ExtendedReal::neg_infinity(), Provenance::kTransformed, n, m};
  }
  return {chi.value + ExtendedReal(log_abs_det(q) + log_abs_det(rm)), Provenance::kTransformed, n, m};
}

ChiValue shift_chi(const ChiValue& chi) { return {chi.value, Provenance::kTransformed, chi.n, chi.m}; }

ExtendedReal chi_upper_bound(std::span<const double> second_moments) {
  require(!second_moments.empty(), "need at least one second moment");
  double c2 = 0.0;
  for (double v : second_moments) {
    require(v >= 0.0, "second moments must be non-negative");
    c2 += v;
  }
  const double k = static_cast<double>(second_moments.size());
  if (c2 == 0.0) return ExtendedReal::neg_infinity();
  return 0.5 * k * std::log(2.0 * std::numbers::pi * std::numbers::e * c2 / k);
}

double subadditivity_gap(const CovarianceSpec& cov, int p, int q) {
  require(p >= 0 && p <= cov.n() && q >= 0 && q <= cov.m(), "split out of range");
  std::vector<int> l1, r1, l2, r2;
  for (int i = 0; i < cov.n(); ++i) (i < p ? l1 : l2).push_back(i);
  for (int j = 0; j < cov.m(); ++j) (j < q ? r1 : r2).push_back(j);
  auto chi_of = [&](const std::vector<int>& l, const std::vector<int>& r) {
    if (l.empty() && r.empty()) return ExtendedReal(0.0);
    return gaussian_chi(cov.restricted(l, r)).value;
  };
  const ExtendedReal a = chi_of(l1, r1);
  const ExtendedReal b = chi_of(l2, r2);
  const ExtendedReal joint = gaussian_chi(cov).value;
  const ExtendedReal blocks = a + b;
  if (joint.is_neg_infinity()) {
    return blocks.is_neg_infinity() ? std::numeric_limits<double>::quiet_NaN()
                                    : std::numeric_limits<double>::infinity();
  }
  return blocks.to_double() - joint.value();
}

int gaussian_delta(const CovarianceSpec& cov) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(cov.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0;
  return static_cast<int>((ev.array() > kRankTolerance * top).count());
}

double perturbed_gaussian_chi(const CovarianceSpec& cov, double eps) {
  require(eps > 0.0, "perturbation must be positive");
  const int k = cov.size();
  const RealMatrix perturbed = cov.matrix() + eps * RealMatrix::Identity(k, k);
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(perturbed, Eigen::EigenvaluesOnly);
  double log_det = 0.0;
  for (double v : solver.eigenvalues()) log_det += std::log(std::max(v, eps));
  return 0.5 * k * kLog2PiE + 0.5 * log_det;
}

double numeric_delta(const CovarianceSpec& cov, std::span<const double> eps_grid) {
  require(eps_grid.size() >= 3, "eps grid needs at least 3 points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double e : eps_grid) {
    require(e > 0.0 && e < 1.0, "eps grid values must lie in (0, 1)");
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  require(std::log10(hi / lo) >= 2.0 - 1e-12, "eps grid must span at least two decades");
  const int k = cov.size();
  std::vector<double> xs, ys;
  for (double e : eps_grid) {
    xs.push_back(std::abs(std::log(std::sqrt(e))));
    ys.push_back(perturbed_gaussian_chi(cov, e));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return k + sxy / sxx;
}

}  // namespace bifree
