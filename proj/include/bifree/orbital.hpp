#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bifree/extended_real.hpp"
#include "bifree/microstate.hpp"
#include "bifree/moments.hpp"
#include "bifree/rng.hpp"
#include "bifree/tuple.hpp"

namespace bifree {

/// l families; family k holds n_k lefts and m_k rights, all of dimension d.
using FamilyTuple = std::vector<MicrostateTuple>;

struct FamilyShape {
  int n = 0;
  int m = 0;
};

struct OrbitalEstimate {
  int d = 0;
  double hit_probability = 0.0;
  double std_error = 0.0;
  std::int64_t hits = 0;
  std::int64_t samples = 0;
  /// (1/d^2) log hit_probability; never above 0.
  ExtendedReal normalized;
  /// (1/d^2) log(1/samples) when there are no hits.
  std::optional<double> one_sided_bound;
  double normalized_std_error() const;
};

/// All lefts of all families in order, then all rights: the variable order of
/// the joint target.
MicrostateTuple joint_tuple(const FamilyTuple& families);

/// Index lists of family k inside the joint target.
std::pair<std::vector<int>, std::vector<int>> family_indices(const FamilyTuple& families, std::size_t k);

/// Fraction of l-tuples of independent Haar unitaries U_k for which the joint
/// tuple (U_k* A U_k, U_k* B U_k)_k lies in Gamma_inf(joint_target; M, d, eps).
/// Each family must first be a microstate of its marginal target, otherwise
/// PreconditionFailure names it.
OrbitalEstimate orbital_hit_probability(const FamilyTuple& families, const TargetMoments& joint_target, int M,
                                        double epsilon, std::int64_t samples, std::uint64_t seed);

/// Fraction of Haar conjugations U_k* C_k U_k that are (M, eps)-free.
double asymptotic_freeness_fraction(const std::vector<std::vector<HermitianMatrix>>& families, int M, double epsilon,
                                    std::int64_t samples, std::uint64_t seed);
double asymptotic_freeness_fraction(const FamilyTuple& families, int M, double epsilon, std::int64_t samples,
                                    std::uint64_t seed);

/// Family with moments of degree <= 2 equal to the covariance exactly: GUE
/// draws, centered, then linearly recombined so that their tau-Gram matrix is cov.
MicrostateTuple standardized_gue_family(const CovarianceSpec& cov, int d, Engine& engine);

using FamilyGenerator = std::function<FamilyTuple(int d, std::uint64_t seed)>;

/// Standardized GUE families for the marginals of a Gaussian joint target.
FamilyGenerator standardized_gue_generator(const TargetMoments& joint_target, const std::vector<FamilyShape>& shapes);

std::vector<OrbitalEstimate> chi_orb_sequence(const FamilyGenerator& generator, const TargetMoments& joint_target,
                                              int M, double epsilon, const std::vector<int>& d_list,
                                              std::int64_t samples, std::uint64_t seed);

struct OrbitalGapBudget {
  std::int64_t volume_samples = 100000;
  std::int64_t orbital_samples = 2000;
  /// Marginal Monte Carlo hits tried as additional fixed tuples.
  int candidates = 4;
};

struct OrbitalGapReport {
  int d = 0;
  VolumeEstimate joint;
  std::vector<VolumeEstimate> marginals;
  OrbitalEstimate orbital;
  /// 0 for the caller's tuple, j >= 1 for the j-th marginal hit tuple.
  int best_candidate = 0;
  ExtendedReal chi_joint;
  ExtendedReal chi_marginals;
  ExtendedReal chi_orb;
  /// chi_orb + sum chi_k - chi_joint, in normalized units; NaN when undefined.
  double gap = 0.0;
  double std_error = 0.0;
  bool consistent = false;
};

/// Estimates every term of chi(joint) <= chi_orb + sum chi(Z_k) at one (M, d, eps).
/// The supremum in chi_orb is taken over the caller's families and marginal
/// Monte Carlo hits. Marginal specs must be the restrictions of joint_spec.
OrbitalGapReport orbital_subadditivity_gap(const FamilyTuple& families, const MicrostateSpec& joint_spec,
                                           const std::vector<MicrostateSpec>& marginal_specs,
                                           const OrbitalGapBudget& budget, std::uint64_t seed);

}  // namespace bifree
