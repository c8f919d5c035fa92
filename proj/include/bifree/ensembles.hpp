#pragma once

#include <cstdint>
#include <variant>

#include "bifree/hermitian.hpp"
#include "bifree/rng.hpp"

namespace bifree {

/// Gaussian unitary ensemble scaled so that E[tau_d(A^2)] = variance:
/// i.i.d. N(0, variance/d) in the orthonormal coordinates of M_d^sa.
HermitianMatrix sample_gue(int dim, double variance, Engine& engine);
HermitianMatrix sample_gue(int dim, double variance, std::uint64_t seed);

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// diag(R) moved into Q, which makes the law exactly Haar.
UnitaryMatrix sample_haar_unitary(int dim, Engine& engine);
UnitaryMatrix sample_haar_unitary(int dim, std::uint64_t seed);

struct Ball {};
struct Shell {
  double r_lo = 0.0;
  double r_hi = 0.0;
};
using BallRegion = std::variant<Ball, Shell>;

/// Uniform sample from the Hilbert-Schmidt ball of the given radius in M_d^sa,
/// or from the shell r_lo <= |A|_HS <= r_hi (radius is then ignored).
HermitianMatrix sample_hs_ball(int dim, double radius, const BallRegion& region, Engine& engine);
HermitianMatrix sample_hs_ball(int dim, double radius, const BallRegion& region, std::uint64_t seed);

/// Uniform point of the Euclidean ball (or shell) in R^n, written to `out`.
/// Shared by the matrix sampler and the Gram-Jacobian brute force.
void sample_euclidean_ball(std::span<double> out, double radius, const BallRegion& region, Engine& engine);

}  // namespace bifree
