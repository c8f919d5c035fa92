#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bifree/extended_real.hpp"
#include "bifree/moments.hpp"
#include "bifree/tuple.hpp"
#include "bifree/word_cache.hpp"

namespace bifree {

enum class MembershipMode {
  kBifreeReduced,    // every reduced word of degree <= M
  kFreeInterleaved,  // every word over the n+m letters of length <= M
  kFilter,           // an explicit list of reduced words
};

struct MicrostateSpec {
  TargetMoments target;
  int M = 2;
  double epsilon = 0.1;
  double R = kNoNormCap;
  int d = 1;
  MembershipMode mode = MembershipMode::kBifreeReduced;
  std::vector<ReducedWord> filter;

  int n() const { return target.n(); }
  int m() const { return target.m(); }
  void validate() const;
};

struct WordDeviation {
  std::string word;
  double deviation = 0.0;
};

struct MembershipResult {
  bool member = false;
  bool within_norm_cap = true;
  WordDeviation worst;
};

/// The words and target values of a spec, resolved once so that repeated
/// membership tests only evaluate traces.
class MembershipChecker {
 public:
  explicit MembershipChecker(const MicrostateSpec& spec);

  /// Full report: every word is evaluated and the worst offender kept.
  MembershipResult check(const MicrostateTuple& tuple) const;

  /// Early-exit test used by the Monte Carlo loops.
  bool contains(std::span<const HermitianMatrix> lefts, std::span<const HermitianMatrix> rights) const;

  /// Every variable's square word is among the checked words.
  bool bounds_second_moments() const;

 private:
  struct Constraint {
    ReducedWord reduced;
    std::vector<int> letters;
    Complex target;
  };
  Complex evaluate(WordCache& cache, const Constraint& c) const;
  std::string word_text(const Constraint& c) const;

  int n_ = 0;
  int m_ = 0;
  int d_ = 0;
  double epsilon_ = 0.0;
  double R_ = kNoNormCap;
  bool interleaved_ = false;
  std::vector<Constraint> constraints_;
};

MembershipResult is_microstate(const MicrostateTuple& tuple, const MicrostateSpec& spec);

/// Uniform on the product of HS balls of the given radius; without a radius,
/// sqrt(d (v_max + epsilon)) from the target's largest second moment.
struct HsBallSampler {
  std::optional<double> radius;
};
/// Independent GUE(variance) matrices, reweighted by 1/density.
struct GueSampler {
  double variance = 1.0;
};
using Sampler = std::variant<HsBallSampler, GueSampler>;

struct VolumeEstimate {
  int d = 0;
  int n = 0;
  int m = 0;
  ExtendedReal log_volume;
  double std_error = 0.0;
  std::int64_t hits = 0;
  std::int64_t samples = 0;
  double reference_log_volume = 0.0;
  ExtendedReal normalized_chi;
  /// log(reference volume / samples) when there are no hits.
  std::optional<double> one_sided_bound;
  /// Standard error of normalized_chi.
  double normalized_std_error() const { return std_error / (static_cast<double>(d) * d); }
};

/// (1/d^2) log_volume + ((n+m)/2) log d.
ExtendedReal normalize_chi(ExtendedReal log_volume, int d, int count);

VolumeEstimate estimate_log_volume(const MicrostateSpec& spec, const Sampler& sampler, std::int64_t samples,
                                   std::uint64_t seed);

/// Same estimate; additionally returns up to max_hits member tuples, in a
/// deterministic order.
VolumeEstimate estimate_log_volume(const MicrostateSpec& spec, const Sampler& sampler, std::int64_t samples,
                                   std::uint64_t seed, std::vector<MicrostateTuple>& hits_out,
                                   std::size_t max_hits);

struct ChiPoint {
  int d = 0;
  VolumeEstimate estimate;
};

/// One estimate per d (ascending) with the template's remaining settings.
std::vector<ChiPoint> chi_sequence(const MicrostateSpec& spec_template, const std::vector<int>& d_list,
                                   const Sampler& sampler, std::int64_t samples, std::uint64_t seed);

struct PushforwardResult {
  /// log vol T(Gamma_before) - log vol Gamma_before; estimates d^2 log|det(Q (+) Rm)|.
  double ratio = 0.0;
  double std_error = 0.0;
  VolumeEstimate before;
  VolumeEstimate image;
  /// Direct estimate of Gamma_after at spec_after's epsilon, for comparison.
  std::optional<VolumeEstimate> after;
};

/// T acts by A'_i = sum_k Q_ik A_k, B'_j = sum_l Rm_jl B_l. The image volume
/// is estimated on a ball enclosing T(Gamma_before), testing membership of
/// the pullback T^{-1} y.
PushforwardResult pushforward_volume_ratio(const RealMatrix& q, const RealMatrix& rm, const MicrostateSpec& spec_before,
                                           const std::optional<MicrostateSpec>& spec_after, std::int64_t samples,
                                           std::uint64_t seed);

}  // namespace bifree
