#include "bifree/ensembles.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "bifree/errors.hpp"
#include "bifree/kernels.hpp"

namespace bifree {

HermitianMatrix sample_gue(int dim, double variance, Engine& engine) {
  require(dim >= 1, "sample_gue: d must be >= 1");
  require(variance > 0.0, "sample_gue: variance must be positive");
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / dim));
  std::vector<double> coords(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
  for (double& x : coords) x = normal(engine);
  return HermitianMatrix::from_coordinates(dim, coords);
}

HermitianMatrix sample_gue(int dim, double variance, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  return sample_gue(dim, variance, engine);
}

UnitaryMatrix sample_haar_unitary(int dim, Engine& engine) {
  require(dim >= 1, "sample_haar_unitary: d must be >= 1");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix z(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) z(i, j) = Complex(normal(engine), normal(engine));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    const Complex phase = mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return UnitaryMatrix(std::move(q));
}

UnitaryMatrix sample_haar_unitary(int dim, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  return sample_haar_unitary(dim, engine);
}

void sample_euclidean_ball(std::span<double> out, double radius, const BallRegion& region, Engine& engine) {
  const auto n = static_cast<double>(out.size());
  double r_lo = 0.0;
  double r_hi = radius;
  if (const auto* shell = std::get_if<Shell>(&region)) {
    require(shell->r_lo >= 0.0 && shell->r_lo < shell->r_hi, "degenerate shell: need 0 <= r_lo < r_hi");
    r_lo = shell->r_lo;
    r_hi = shell->r_hi;
  } else {
    require(radius > 0.0, "ball radius must be positive");
  }
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  double norm2 = 0.0;
  do {
    for (double& x : out) x = normal(engine);
    norm2 = kernels::sum_squares(out);
  } while (norm2 == 0.0);
  // Radial law has density proportional to r^{n-1} on [r_lo, r_hi].
  const double q = std::pow(r_lo / r_hi, n);
  const double r = r_hi * std::pow(q + uniform(engine) * (1.0 - q), 1.0 / n);
  const double scale = r / std::sqrt(norm2);
  for (double& x : out) x *= scale;
}

HermitianMatrix sample_hs_ball(int dim, double radius, const BallRegion& region, Engine& engine) {
  require(dim >= 1, "sample_hs_ball: d must be >= 1");
  std::vector<double> coords(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
  sample_euclidean_ball(coords, radius, region, engine);
  return HermitianMatrix::from_coordinates(dim, coords);
}

HermitianMatrix sample_hs_ball(int dim, double radius, const BallRegion& region, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  return sample_hs_ball(dim, radius, region, engine);
}

}  // namespace bifree
