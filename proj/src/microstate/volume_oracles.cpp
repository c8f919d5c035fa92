#include "bifree/volume_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "bifree/ensembles.hpp"
#include "bifree/errors.hpp"
#include "bifree/kernels.hpp"
#include "bifree/parallel.hpp"

namespace bifree {
namespace {

const double kLogPi = std::log(std::numbers::pi);

// sign(x) I_{x^2}(1/2, a), with the complement used near |x| = 1.
struct SignedIbeta {
  double a;
  double upper(double x) const { return boost::math::ibetac(0.5, a, x * x); }
  double lower(double x) const { return boost::math::ibeta(0.5, a, x * x); }
  // G(x2) - G(x1) for -1 <= x1 <= x2 <= 1.
  double difference(double x1, double x2) const {
    if (x2 <= x1) return 0.0;
    if (x1 < 0.0 && x2 > 0.0) return lower(x2) + lower(-x1);
    // Same sign: subtract whichever tail stays away from 1.
    const double near = std::min(std::abs(x1), std::abs(x2));
    const double far = std::max(std::abs(x1), std::abs(x2));
    const double l_far = lower(far);
    if (l_far <= 0.5) return l_far - lower(near);
    return upper(near) - upper(far);
  }
};

}  // namespace

double log_unit_ball_volume(int dim) {
  require(dim >= 1, "ball dimension must be >= 1");
  return 0.5 * dim * kLogPi - std::lgamma(0.5 * dim + 1.0);
}

double reference_log_volume(int d, int count, double radius) {
  require(d >= 1 && count >= 1, "reference volume needs d >= 1 and count >= 1");
  require(radius > 0.0, "reference radius must be positive");
  const int N = d * d;
  return count * (log_unit_ball_volume(N) + N * std::log(radius));
}

double log_gram_constant(int N) {
  require(N >= 2, "Gram constant needs N >= 2");
  return N * kLogPi - 0.5 * kLogPi - std::lgamma(0.5 * N) - std::lgamma(0.5 * (N - 1));
}

double gram_log_volume(int N, double scale, double epsilon, double c) {
  require(N >= 2, "gram volume needs N >= 2");
  require(scale > 0.0, "scale must be positive");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(std::abs(c) <= 1.0, "|c| must be <= 1");
  // In units of s: integrate (ab - t^2)^alpha over a, b in [1-eps, 1+eps] and
  // t in [c-eps, c+eps]. The t-integral is analytic:
  //   (ab)^{alpha+1/2} * (1/2) B(1/2, alpha+1) * [G(t2/sqrt(ab)) - G(t1/sqrt(ab))].
  const double alpha = 0.5 * (N - 3);
  const double power = alpha + 0.5;
  const SignedIbeta g{alpha + 1.0};
  const double log_half_beta = std::log(0.5) + std::lgamma(0.5) + std::lgamma(alpha + 1.0) - std::lgamma(alpha + 1.5);
  const double lo = 1.0 - epsilon;
  const double hi = 1.0 + epsilon;
  const double shift = 2.0 * power * std::log(hi);
  auto inner = [&](double a, double b) {
    const double root = std::sqrt(a * b);
    const double x1 = std::clamp((c - epsilon) / root, -1.0, 1.0);
    const double x2 = std::clamp((c + epsilon) / root, -1.0, 1.0);
    const double diff = g.difference(x1, x2);
    if (diff <= 0.0) return 0.0;
    return std::exp(power * std::log(a * b) - shift) * diff;
  };
  using boost::math::quadrature::gauss_kronrod;
  constexpr double kTol = 1e-11;
  auto outer = [&](double a) {
    return gauss_kronrod<double, 31>::integrate([&](double b) { return inner(a, b); }, lo, hi, 12, kTol);
  };
  const double integral = gauss_kronrod<double, 31>::integrate(outer, lo, hi, 12, kTol);
  if (integral <= 0.0) return -std::numeric_limits<double>::infinity();
  return log_gram_constant(N) + N * std::log(scale) + std::log(integral) + shift + log_half_beta;
}

double pair_constraint_log_volume_oracle(int d, double epsilon, double c) {
  require(d >= 1, "d must be >= 1");
  require(d * d >= 2, "the pair oracle needs d >= 2");
  return gram_log_volume(d * d, d, epsilon, c);
}

double cone_upper_bound(int d, double epsilon, double c) {
  require(d >= 1, "d must be >= 1");
  require(epsilon > 0.0, "epsilon must be positive");
  require(std::abs(c) < 1.0, "the cone bound needs |c| < 1; at |c| = 1 the entropy is -inf");
  const double N = static_cast<double>(d) * d;
  const double one_minus = 1.0 - c * c;
  const double spread = 1.0 + epsilon * (1.0 + std::abs(c)) * (1.0 + std::abs(c)) / one_minus;
  return 0.5 * N * std::log(one_minus) + 2.0 * (0.5 * N * kLogPi - std::lgamma(0.5 * N + 1.0)) +
         N * std::log(d * spread);
}

GramValidation validate_gram_constant(int N, std::int64_t samples, std::uint64_t seed, double epsilon, double c,
                                      double scale) {
  require(samples >= 1, "samples must be >= 1");
  GramValidation out;
  out.N = N;
  out.scale = scale;
  out.epsilon = epsilon;
  out.c = c;
  out.samples = samples;
  out.oracle_log_volume = gram_log_volume(N, scale, epsilon, c);

  const double radius = std::sqrt(scale * (1.0 + epsilon));
  const double u_lo = scale * (1.0 - epsilon);
  const double u_hi = scale * (1.0 + epsilon);
  const double w_lo = scale * (c - epsilon);
  const double w_hi = scale * (c + epsilon);
  const Tally tally = run_blocks<Tally>(
      samples, seed,
      [&](Engine& engine, std::int64_t begin, std::int64_t end) {
        Tally t;
        std::vector<double> x(static_cast<std::size_t>(N));
        std::vector<double> y(static_cast<std::size_t>(N));
        for (std::int64_t k = begin; k < end; ++k) {
          sample_euclidean_ball(x, radius, Ball{}, engine);
          sample_euclidean_ball(y, radius, Ball{}, engine);
          const double u = kernels::sum_squares(x);
          const double v = kernels::sum_squares(y);
          const double w = kernels::dot(x, y);
          ++t.trials;
          if (u >= u_lo && u <= u_hi && v >= u_lo && v <= u_hi && w >= w_lo && w <= w_hi) ++t.hits;
        }
        return t;
      },
      [](Tally& acc, const Tally& part) { acc += part; });
  out.hits = tally.hits;
  const double log_ball = 2.0 * (log_unit_ball_volume(N) + N * std::log(radius));
  if (tally.hits == 0) {
    out.mc_log_volume = -std::numeric_limits<double>::infinity();
    out.std_error = std::numeric_limits<double>::infinity();
    out.z_score = -std::numeric_limits<double>::infinity();
    out.pass = false;
    return out;
  }
  const double p = static_cast<double>(tally.hits) / static_cast<double>(samples);
  out.mc_log_volume = log_ball + std::log(p);
  out.std_error = std::sqrt((1.0 - p) / static_cast<double>(tally.hits));
  out.z_score = (out.mc_log_volume - out.oracle_log_volume) / out.std_error;
  out.pass = std::abs(out.z_score) <= 3.0;
  return out;
}

}  // namespace bifree
