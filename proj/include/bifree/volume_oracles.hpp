#pragma once

#include <cstdint>

namespace bifree {

/// log of the volume of the unit ball in R^dim.
double log_unit_ball_volume(int dim);

/// (count) [ (d^2/2) log pi - log Gamma(d^2/2 + 1) + d^2 log(radius) ]: the
/// product of `count` HS balls in M_d^sa.
double reference_log_volume(int d, int count, double radius);

/// log c_N, the constant in dx dy = c_N det(G)^{(N-3)/2} dG for pairs of
/// vectors in R^N with Gram matrix G.
double log_gram_constant(int N);

/// Exact log-volume of the pairs (x, y) in R^N x R^N with |x|^2, |y|^2 in
/// [s(1-eps), s(1+eps)] and <x, y> in [s(c-eps), s(c+eps)].
double gram_log_volume(int N, double scale, double epsilon, double c);

/// gram_log_volume(d^2, d, epsilon, c): the set 1-eps <= tau(A_k^2) <= 1+eps,
/// c-eps <= tau(A_1 A_2) <= c+eps in (M_d^sa)^2.
double pair_constraint_log_volume_oracle(int d, double epsilon, double c);

/// Closed-form upper bound on the same log-volume from the cone argument.
double cone_upper_bound(int d, double epsilon, double c);

struct GramValidation {
  int N = 0;
  double scale = 1.0;
  double epsilon = 0.0;
  double c = 0.0;
  std::int64_t samples = 0;
  std::int64_t hits = 0;
  double mc_log_volume = 0.0;
  double std_error = 0.0;
  double oracle_log_volume = 0.0;
  /// (mc - oracle) / std_error.
  double z_score = 0.0;
  bool pass = false;
};

/// Brute-force check of gram_log_volume: uniform pairs from two balls in R^N,
/// hit fraction times ball volumes. Passes within 3 standard errors.
GramValidation validate_gram_constant(int N, std::int64_t samples, std::uint64_t seed, double epsilon = 0.3,
                                      double c = 0.2, double scale = 1.0);

}  // namespace bifree
