#include "bifree/microstate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "bifree/ensembles.hpp"
#include "bifree/errors.hpp"
#include "bifree/parallel.hpp"
#include "bifree/volume_oracles.hpp"

namespace bifree {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Importance weights are merged in log space; with uniform sampling all
// weights are equal and only the tallies matter.
struct VolumePartial {
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double max_log_weight = -kInf;
  double sum_w = 0.0;   // sum exp(lw - max)
  double sum_w2 = 0.0;  // sum exp(2 (lw - max))
  std::vector<MicrostateTuple> kept;

  void add_weight(double lw) {
    if (lw > max_log_weight) {
      const double f = std::exp(max_log_weight - lw);
      sum_w *= f;
      sum_w2 *= f * f;
      max_log_weight = lw;
    }
    const double e = std::exp(lw - max_log_weight);
    sum_w += e;
    sum_w2 += e * e;
  }

  void merge(const VolumePartial& other, std::size_t max_kept) {
    hits += other.hits;
    trials += other.trials;
    if (other.sum_w > 0.0) {
      const double top = std::max(max_log_weight, other.max_log_weight);
      const double fa = sum_w > 0.0 ? std::exp(max_log_weight - top) : 0.0;
      const double fb = std::exp(other.max_log_weight - top);
      sum_w = sum_w * fa + other.sum_w * fb;
      sum_w2 = sum_w2 * fa * fa + other.sum_w2 * fb * fb;
      max_log_weight = top;
    }
    for (const auto& t : other.kept) {
      if (kept.size() >= max_kept) break;
      kept.push_back(t);
    }
  }
};

double auto_radius(const MicrostateSpec& spec) {
  return std::sqrt(spec.d * (spec.target.max_second_moment() + spec.epsilon));
}

// Draws a tuple in the reference measure and returns its log density (0 for
// the uniform ball, where the density is folded into the reference volume).
struct TupleDraw {
  int d;
  int n;
  int m;
  bool gue;
  double radius;
  double variance;

  double operator()(Engine& engine, std::vector<HermitianMatrix>& lefts, std::vector<HermitianMatrix>& rights) const {
    double log_density = 0.0;
    const double sigma2 = variance / d;
    const double n_coords = static_cast<double>(d) * d;
    auto draw = [&]() {
      if (!gue) return sample_hs_ball(d, radius, Ball{}, engine);
      HermitianMatrix a = sample_gue(d, variance, engine);
      const double r = a.hs_norm();
      log_density += -0.5 * n_coords * std::log(2.0 * std::numbers::pi * sigma2) - r * r / (2.0 * sigma2);
      return a;
    };
    for (int i = 0; i < n; ++i) lefts[static_cast<std::size_t>(i)] = draw();
    for (int j = 0; j < m; ++j) rights[static_cast<std::size_t>(j)] = draw();
    return log_density;
  }
};

using TupleMap = std::function<void(std::vector<HermitianMatrix>&, std::vector<HermitianMatrix>&)>;

VolumePartial run_volume(const MembershipChecker& checker, const TupleDraw& draw, std::int64_t samples,
                         std::uint64_t seed, std::size_t max_kept, const TupleMap& pullback) {
  return run_blocks<VolumePartial>(
      samples, seed,
      [&](Engine& engine, std::int64_t begin, std::int64_t end) {
        VolumePartial part;
        std::vector<HermitianMatrix> lefts(static_cast<std::size_t>(draw.n));
        std::vector<HermitianMatrix> rights(static_cast<std::size_t>(draw.m));
        for (std::int64_t k = begin; k < end; ++k) {
          const double log_density = draw(engine, lefts, rights);
          if (pullback) pullback(lefts, rights);
          ++part.trials;
          if (!checker.contains(lefts, rights)) continue;
          ++part.hits;
          if (draw.gue) part.add_weight(-log_density);
          if (part.kept.size() < max_kept) part.kept.push_back({lefts, rights, kNoNormCap});
        }
        return part;
      },
      [max_kept](VolumePartial& acc, const VolumePartial& part) { acc.merge(part, max_kept); });
}

VolumeEstimate finish(const MicrostateSpec& spec, const VolumePartial& tally, bool gue, double ball_log_volume) {
  VolumeEstimate e;
  e.d = spec.d;
  e.n = spec.n();
  e.m = spec.m();
  e.hits = tally.hits;
  e.samples = tally.trials;
  const double N = static_cast<double>(tally.trials);
  if (tally.hits == 0) {
    e.log_volume = ExtendedReal::neg_infinity();
    e.std_error = kInf;
    e.reference_log_volume = gue ? std::numeric_limits<double>::quiet_NaN() : ball_log_volume;
    if (!gue) e.one_sided_bound = ball_log_volume - std::log(N);
  } else if (!gue) {
    const double p = static_cast<double>(tally.hits) / N;
    e.reference_log_volume = ball_log_volume;
    e.log_volume = ball_log_volume + std::log(p);
    e.std_error = std::sqrt((1.0 - p) / static_cast<double>(tally.hits));
  } else {
    // Mean of w 1_Gamma over all draws; reference is the mean weight over hits.
    const double log_mean = tally.max_log_weight + std::log(tally.sum_w) - std::log(N);
    e.log_volume = log_mean;
    e.reference_log_volume = tally.max_log_weight + std::log(tally.sum_w) - std::log(static_cast<double>(tally.hits));
    const double rel_var = N * tally.sum_w2 / (tally.sum_w * tally.sum_w) - 1.0;
    e.std_error = std::sqrt(std::max(rel_var, 0.0) / N);
  }
  e.normalized_chi = normalize_chi(e.log_volume, spec.d, spec.n() + spec.m());
  return e;
}

void check_budget(const MicrostateSpec& spec, std::int64_t samples) {
  require(samples >= 1, "samples must be >= 1");
  if (spec.n() + spec.m() > 4 && spec.M > 4) {
    throw InvalidArgument("volume estimation for n+m > 4 at M > 4 is not supported (word count grows as (n+m)^M)");
  }
}

}  // namespace

void MicrostateSpec::validate() const {
  require(epsilon > 0.0, "epsilon must be positive");
  require(M >= 1, "M must be >= 1");
  require(d >= 1, "d must be >= 1");
  require(R > 0.0, "R must be positive");
  require(n() + m() >= 1, "target has no variables");
  require(target.degree_cap() >= M, "target degree cap is below M");
  if (mode == MembershipMode::kFreeInterleaved) {
    require(target.has_interleaved(), "free-interleaved mode needs a Gaussian or empirical target");
  }
  if (mode == MembershipMode::kFilter) {
    require(!filter.empty(), "filter mode needs at least one word");
    for (const auto& w : filter) {
      w.validate(n(), m());
      require(w.degree() <= M, "filter word " + w.to_string() + " exceeds M");
    }
  }
}

MembershipChecker::MembershipChecker(const MicrostateSpec& spec)
    : n_(spec.n()), m_(spec.m()), d_(spec.d), epsilon_(spec.epsilon), R_(spec.R) {
  spec.validate();
  switch (spec.mode) {
    case MembershipMode::kBifreeReduced:
      for (auto& w : enumerate_reduced_words(n_, m_, spec.M)) {
        const Complex t = spec.target.reduced(w);
        constraints_.push_back({std::move(w), {}, t});
      }
      break;
    case MembershipMode::kFilter:
      for (const auto& w : spec.filter) constraints_.push_back({w, {}, spec.target.reduced(w)});
      break;
    case MembershipMode::kFreeInterleaved:
      interleaved_ = true;
      for (auto& w : enumerate_words(n_ + m_, spec.M)) {
        const Complex t = spec.target.interleaved(w);
        constraints_.push_back({{}, std::move(w), t});
      }
      break;
  }
}

bool MembershipChecker::bounds_second_moments() const {
  for (int k = 0; k < n_ + m_; ++k) {
    bool found = false;
    for (const auto& c : constraints_) {
      if (interleaved_) {
        found = c.letters == std::vector<int>{k, k};
      } else if (k < n_) {
        found = c.reduced.right.empty() && c.reduced.left == std::vector<int>{k, k};
      } else {
        found = c.reduced.left.empty() && c.reduced.right == std::vector<int>{k - n_, k - n_};
      }
      if (found) break;
    }
    if (!found) return false;
  }
  return true;
}

Complex MembershipChecker::evaluate(WordCache& cache, const Constraint& c) const {
  return interleaved_ ? cache.interleaved(c.letters) : cache.reduced(c.reduced);
}

std::string MembershipChecker::word_text(const Constraint& c) const {
  if (!interleaved_) return c.reduced.to_string();
  LRWord w;
  for (int k : c.letters) w.tokens.push_back(k < n_ ? left(k) : right(k - n_));
  return w.to_string();
}

MembershipResult MembershipChecker::check(const MicrostateTuple& tuple) const {
  tuple.validate();
  require(tuple.n() == n_ && tuple.m() == m_, "tuple variable counts do not match the spec");
  require(tuple.dim() == d_, "tuple dimension does not match the spec");
  MembershipResult out;
  WordCache cache(tuple.lefts, tuple.rights);
  bool first = true;
  bool words_ok = true;
  for (const auto& c : constraints_) {
    const double dev = std::abs(c.target - evaluate(cache, c));
    if (first || dev > out.worst.deviation) {
      out.worst = {word_text(c), dev};
      first = false;
    }
    if (!(dev < epsilon_)) words_ok = false;
  }
  if (std::isfinite(R_)) {
    for (const auto* side : {&tuple.lefts, &tuple.rights}) {
      for (const auto& a : *side) {
        if (operator_norm(a) > R_) out.within_norm_cap = false;
      }
    }
  }
  out.member = words_ok && out.within_norm_cap;
  return out;
}

bool MembershipChecker::contains(std::span<const HermitianMatrix> lefts, std::span<const HermitianMatrix> rights) const {
  WordCache cache(lefts, rights);
  for (const auto& c : constraints_) {
    if (!(std::abs(c.target - evaluate(cache, c)) < epsilon_)) return false;
  }
  if (std::isfinite(R_)) {
    for (const auto& a : lefts) {
      if (operator_norm(a) > R_) return false;
    }
    for (const auto& b : rights) {
      if (operator_norm(b) > R_) return false;
    }
  }
  return true;
}

MembershipResult is_microstate(const MicrostateTuple& tuple, const MicrostateSpec& spec) {
  return MembershipChecker(spec).check(tuple);
}

ExtendedReal normalize_chi(ExtendedReal log_volume, int d, int count) {
  require(d >= 1, "d must be >= 1");
  return log_volume * (1.0 / (static_cast<double>(d) * d)) + ExtendedReal(0.5 * count * std::log(d));
}

VolumeEstimate estimate_log_volume(const MicrostateSpec& spec, const Sampler& sampler, std::int64_t samples,
                                   std::uint64_t seed, std::vector<MicrostateTuple>& hits_out, std::size_t max_hits) {
  check_budget(spec, samples);
  const MembershipChecker checker(spec);
  TupleDraw draw{spec.d, spec.n(), spec.m(), false, 0.0, 1.0};
  double ball_log_volume = 0.0;
  if (const auto* ball = std::get_if<HsBallSampler>(&sampler)) {
    require(checker.bounds_second_moments(),
            "the ball reference needs every variable's square word among the checked words");
    const double needed = auto_radius(spec);
    const double radius = ball->radius.value_or(needed);
    require(radius > 0.0, "ball radius must be positive");
    if (radius < needed * (1.0 - 1e-12)) {
      throw InvalidArgument("ball radius " + std::to_string(radius) + " does not enclose the feasible set (needs >= " +
                            std::to_string(needed) + ")");
    }
    draw.radius = radius;
    ball_log_volume = reference_log_volume(spec.d, spec.n() + spec.m(), radius);
  } else {
    const auto& gue = std::get<GueSampler>(sampler);
    require(gue.variance > 0.0, "GUE variance must be positive");
    draw.gue = true;
    draw.variance = gue.variance;
  }
  const VolumePartial tally = run_volume(checker, draw, samples, seed, max_hits, nullptr);
  hits_out = tally.kept;
  for (auto& t : hits_out) t.norm_cap = spec.R;
  return finish(spec, tally, draw.gue, ball_log_volume);
}

VolumeEstimate estimate_log_volume(const MicrostateSpec& spec, const Sampler& sampler, std::int64_t samples,
                                   std::uint64_t seed) {
  std::vector<MicrostateTuple> unused;
  return estimate_log_volume(spec, sampler, samples, seed, unused, 0);
}

std::vector<ChiPoint> chi_sequence(const MicrostateSpec& spec_template, const std::vector<int>& d_list,
                                   const Sampler& sampler, std::int64_t samples, std::uint64_t seed) {
  require(!d_list.empty(), "d_list is empty");
  require(std::is_sorted(d_list.begin(), d_list.end()) &&
              std::adjacent_find(d_list.begin(), d_list.end()) == d_list.end(),
          "d_list must be strictly ascending");
  std::vector<ChiPoint> out;
  for (int d : d_list) {
    MicrostateSpec spec = spec_template;
    spec.d = d;
    out.push_back({d, estimate_log_volume(spec, sampler, samples, derive_seed(seed, static_cast<std::uint64_t>(d)))});
  }
  return out;
}

PushforwardResult pushforward_volume_ratio(const RealMatrix& q, const RealMatrix& rm, const MicrostateSpec& spec_before,
                                           const std::optional<MicrostateSpec>& spec_after, std::int64_t samples,
                                           std::uint64_t seed) {
  check_budget(spec_before, samples);
  const int n = spec_before.n();
  const int m = spec_before.m();
  require(q.rows() == n && q.cols() == n, "Q must be n x n");
  require(rm.rows() == m && rm.cols() == m, "Rm must be m x m");
  const double det_q = n > 0 ? q.determinant() : 1.0;
  const double det_r = m > 0 ? rm.determinant() : 1.0;
  require(std::abs(det_q) > 1e-12, "Q is singular");
  require(std::abs(det_r) > 1e-12, "Rm is singular");

  if (spec_after && spec_before.target.covariance() && spec_after->target.covariance()) {
    RealMatrix t = RealMatrix::Zero(n + m, n + m);
    if (n > 0) t.topLeftCorner(n, n) = q;
    if (m > 0) t.bottomRightCorner(m, m) = rm;
    const RealMatrix pushed = t * spec_before.target.covariance()->matrix() * t.transpose();
    require((pushed - spec_after->target.covariance()->matrix()).cwiseAbs().maxCoeff() <= 1e-10,
            "spec_after's covariance is not the pushforward of spec_before's");
  }

  PushforwardResult out;
  out.before = estimate_log_volume(spec_before, HsBallSampler{}, samples, derive_seed(seed, 1));

  const MembershipChecker checker(spec_before);
  const double r = auto_radius(spec_before);
  double row_sum = 0.0;
  for (int i = 0; i < n; ++i) row_sum = std::max(row_sum, q.row(i).cwiseAbs().sum());
  for (int j = 0; j < m; ++j) row_sum = std::max(row_sum, rm.row(j).cwiseAbs().sum());
  const double radius = r * row_sum;
  const RealMatrix q_inv = n > 0 ? RealMatrix(q.inverse()) : RealMatrix();
  const RealMatrix r_inv = m > 0 ? RealMatrix(rm.inverse()) : RealMatrix();
  auto combine = [](const RealMatrix& coeffs, std::vector<HermitianMatrix>& mats) {
    std::vector<HermitianMatrix> out;
    out.reserve(mats.size());
    for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
      HermitianMatrix acc = HermitianMatrix::zero(mats.front().dim());
      for (Eigen::Index k = 0; k < coeffs.cols(); ++k) {
        if (coeffs(i, k) != 0.0) acc = acc + mats[static_cast<std::size_t>(k)] * coeffs(i, k);
      }
      out.push_back(std::move(acc));
    }
    mats = std::move(out);
  };
  const TupleMap pullback = [&](std::vector<HermitianMatrix>& lefts, std::vector<HermitianMatrix>& rights) {
    if (n > 0) combine(q_inv, lefts);
    if (m > 0) combine(r_inv, rights);
  };
  const TupleDraw draw{spec_before.d, n, m, false, radius, 1.0};
  const VolumePartial tally = run_volume(checker, draw, samples, derive_seed(seed, 2), 0, pullback);
  out.image = finish(spec_before, tally, false, reference_log_volume(spec_before.d, n + m, radius));

  if (out.before.log_volume.is_finite() && out.image.log_volume.is_finite()) {
    out.ratio = out.image.log_volume.value() - out.before.log_volume.value();
    out.std_error = std::hypot(out.before.std_error, out.image.std_error);
  } else {
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    out.std_error = kInf;
  }
  if (spec_after) out.after = estimate_log_volume(*spec_after, HsBallSampler{}, samples, derive_seed(seed, 3));
  return out;
}

}  // namespace bifree
