#include "bifree/orbital.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "bifree/cumulants.hpp"
#include "bifree/ensembles.hpp"
#include "bifree/errors.hpp"
#include "bifree/parallel.hpp"

namespace bifree {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int shared_dimension(const FamilyTuple& families) {
  require(!families.empty(), "no families supplied");
  int d = -1;
  for (const auto& f : families) {
    f.validate();
    if (d < 0) d = f.dim();
    require(f.dim() == d, "families must share one dimension");
  }
  return d;
}

OrbitalEstimate make_estimate(int d, const Tally& t) {
  OrbitalEstimate e;
  e.d = d;
  e.hits = t.hits;
  e.samples = t.trials;
  const double N = static_cast<double>(t.trials);
  const double p = static_cast<double>(t.hits) / N;
  e.hit_probability = p;
  e.std_error = std::sqrt(p * (1.0 - p) / N);
  const double inv_d2 = 1.0 / (static_cast<double>(d) * d);
  e.normalized = ExtendedReal::log_of(p) * inv_d2;
  if (t.hits == 0) e.one_sided_bound = -std::log(N) * inv_d2;
  return e;
}

// PSD square root through the spectral decomposition (negative noise clipped).
RealMatrix psd_sqrt(const RealMatrix& a) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(a);
  const RealVector root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

double OrbitalEstimate::normalized_std_error() const {
  if (hits == 0) return kInf;
  return std_error / hit_probability / (static_cast<double>(d) * d);
}

MicrostateTuple joint_tuple(const FamilyTuple& families) {
  MicrostateTuple out;
  for (const auto& f : families) out.lefts.insert(out.lefts.end(), f.lefts.begin(), f.lefts.end());
  for (const auto& f : families) out.rights.insert(out.rights.end(), f.rights.begin(), f.rights.end());
  return out;
}

std::pair<std::vector<int>, std::vector<int>> family_indices(const FamilyTuple& families, std::size_t k) {
  require(k < families.size(), "family index out of range");
  int left_offset = 0;
  int right_offset = 0;
  for (std::size_t f = 0; f < k; ++f) {
    left_offset += families[f].n();
    right_offset += families[f].m();
  }
  std::pair<std::vector<int>, std::vector<int>> out;
  for (int i = 0; i < families[k].n(); ++i) out.first.push_back(left_offset + i);
  for (int j = 0; j < families[k].m(); ++j) out.second.push_back(right_offset + j);
  return out;
}

OrbitalEstimate orbital_hit_probability(const FamilyTuple& families, const TargetMoments& joint_target, int M,
                                        double epsilon, std::int64_t samples, std::uint64_t seed) {
  const int d = shared_dimension(families);
  require(samples >= 1, "samples must be >= 1");
  const MicrostateTuple joint = joint_tuple(families);
  require(joint.n() == joint_target.n() && joint.m() == joint_target.m(),
          "joint target variable counts do not match the families");

  for (std::size_t k = 0; k < families.size(); ++k) {
    const auto [li, ri] = family_indices(families, k);
    MicrostateSpec marginal{joint_target.restricted(li, ri), M, epsilon, kNoNormCap, d,
                            MembershipMode::kBifreeReduced, {}};
    const MembershipResult r = is_microstate(families[k], marginal);
    if (!r.member) {
      throw PreconditionFailure("family " + std::to_string(k + 1) +
                                " is not a microstate of its marginal target (worst word " + r.worst.word +
                                ", deviation " + std::to_string(r.worst.deviation) + ")");
    }
  }

  const MicrostateSpec joint_spec{joint_target, M, epsilon, kNoNormCap, d, MembershipMode::kBifreeReduced, {}};
  const MembershipChecker checker(joint_spec);
  const Tally tally = run_blocks<Tally>(
      samples, seed,
      [&](Engine& engine, std::int64_t begin, std::int64_t end) {
        Tally t;
        std::vector<HermitianMatrix> lefts;
        std::vector<HermitianMatrix> rights;
        for (std::int64_t k = begin; k < end; ++k) {
          lefts.clear();
          rights.clear();
          std::vector<MicrostateTuple> conj;
          conj.reserve(families.size());
          for (const auto& f : families) conj.push_back(f.conjugated_by(sample_haar_unitary(d, engine)));
          for (const auto& f : conj) lefts.insert(lefts.end(), f.lefts.begin(), f.lefts.end());
          for (const auto& f : conj) rights.insert(rights.end(), f.rights.begin(), f.rights.end());
          ++t.trials;
          if (checker.contains(lefts, rights)) ++t.hits;
        }
        return t;
      },
      [](Tally& acc, const Tally& part) { acc += part; });
  return make_estimate(d, tally);
}

double asymptotic_freeness_fraction(const std::vector<std::vector<HermitianMatrix>>& families, int M, double epsilon,
                                    std::int64_t samples, std::uint64_t seed) {
  require(!families.empty(), "no families supplied");
  require(samples >= 1, "samples must be >= 1");
  const int d = families.front().empty() ? 0 : families.front().front().dim();
  for (const auto& f : families) {
    require(!f.empty(), "family is empty");
    for (const auto& a : f) require(a.dim() == d, "families must share one dimension");
  }
  if (families.size() == 1) return 1.0;
  const Tally tally = run_blocks<Tally>(
      samples, seed,
      [&](Engine& engine, std::int64_t begin, std::int64_t end) {
        Tally t;
        for (std::int64_t k = begin; k < end; ++k) {
          std::vector<std::vector<HermitianMatrix>> conj;
          conj.reserve(families.size());
          for (const auto& f : families) {
            const UnitaryMatrix u = sample_haar_unitary(d, engine);
            std::vector<HermitianMatrix> c;
            c.reserve(f.size());
            for (const auto& a : f) c.push_back(a.conjugated_by(u));
            conj.push_back(std::move(c));
          }
          ++t.trials;
          if (is_m_eps_free(conj, M, epsilon).free) ++t.hits;
        }
        return t;
      },
      [](Tally& acc, const Tally& part) { acc += part; });
  return static_cast<double>(tally.hits) / static_cast<double>(tally.trials);
}

double asymptotic_freeness_fraction(const FamilyTuple& families, int M, double epsilon, std::int64_t samples,
                                    std::uint64_t seed) {
  std::vector<std::vector<HermitianMatrix>> flat;
  for (const auto& f : families) {
    std::vector<HermitianMatrix> all(f.lefts);
    all.insert(all.end(), f.rights.begin(), f.rights.end());
    flat.push_back(std::move(all));
  }
  return asymptotic_freeness_fraction(flat, M, epsilon, samples, seed);
}

MicrostateTuple standardized_gue_family(const CovarianceSpec& cov, int d, Engine& engine) {
  const int k = cov.size();
  require(d >= 1, "d must be >= 1");
  require(static_cast<long>(d) * d > k, "need d^2 > n+m for linearly independent draws");
  std::vector<HermitianMatrix> raw;
  for (int i = 0; i < k; ++i) {
    HermitianMatrix a = sample_gue(d, 1.0, engine);
    raw.push_back(a - HermitianMatrix::identity(d) * a.normalized_trace());
  }
  RealMatrix gram(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) gram(i, j) = hs_inner(raw[static_cast<std::size_t>(i)], raw[static_cast<std::size_t>(j)]) / d;
  }
  const Eigen::LLT<RealMatrix> llt(gram);
  require(llt.info() == Eigen::Success, "GUE draws are linearly dependent");
  const RealMatrix l_inv = llt.matrixL().solve(RealMatrix::Identity(k, k));
  const RealMatrix t = psd_sqrt(cov.matrix()) * l_inv;
  std::vector<HermitianMatrix> mixed;
  for (int i = 0; i < k; ++i) {
    HermitianMatrix acc = HermitianMatrix::zero(d);
    for (int j = 0; j < k; ++j) {
      if (t(i, j) != 0.0) acc = acc + raw[static_cast<std::size_t>(j)] * t(i, j);
    }
    mixed.push_back(std::move(acc));
  }
  MicrostateTuple out;
  for (int i = 0; i < cov.n(); ++i) out.lefts.push_back(mixed[static_cast<std::size_t>(i)]);
  for (int j = 0; j < cov.m(); ++j) out.rights.push_back(mixed[static_cast<std::size_t>(cov.n() + j)]);
  return out;
}

FamilyGenerator standardized_gue_generator(const TargetMoments& joint_target, const std::vector<FamilyShape>& shapes) {
  require(joint_target.covariance().has_value(), "standardized GUE families need a Gaussian target");
  int n = 0;
  int m = 0;
  for (const auto& s : shapes) {
    require(s.n >= 0 && s.m >= 0 && s.n + s.m >= 1, "every family needs at least one variable");
    n += s.n;
    m += s.m;
  }
  require(n == joint_target.n() && m == joint_target.m(), "family shapes do not match the joint target");
  std::vector<CovarianceSpec> marginals;
  int lo = 0;
  int ro = 0;
  for (const auto& s : shapes) {
    std::vector<int> li, ri;
    for (int i = 0; i < s.n; ++i) li.push_back(lo + i);
    for (int j = 0; j < s.m; ++j) ri.push_back(ro + j);
    lo += s.n;
    ro += s.m;
    marginals.push_back(joint_target.covariance()->restricted(li, ri));
  }
  return [marginals](int d, std::uint64_t seed) {
    Engine engine = make_engine(seed);
    FamilyTuple out;
    for (const auto& cov : marginals) out.push_back(standardized_gue_family(cov, d, engine));
    return out;
  };
}

std::vector<OrbitalEstimate> chi_orb_sequence(const FamilyGenerator& generator, const TargetMoments& joint_target,
                                              int M, double epsilon, const std::vector<int>& d_list,
                                              std::int64_t samples, std::uint64_t seed) {
  require(!d_list.empty(), "d_list is empty");
  require(std::is_sorted(d_list.begin(), d_list.end()) &&
              std::adjacent_find(d_list.begin(), d_list.end()) == d_list.end(),
          "d_list must be strictly ascending");
  std::vector<OrbitalEstimate> out;
  for (int d : d_list) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(d));
    const FamilyTuple families = generator(d, derive_seed(s, 1));
    out.push_back(orbital_hit_probability(families, joint_target, M, epsilon, samples, derive_seed(s, 2)));
  }
  return out;
}

OrbitalGapReport orbital_subadditivity_gap(const FamilyTuple& families, const MicrostateSpec& joint_spec,
                                           const std::vector<MicrostateSpec>& marginal_specs,
                                           const OrbitalGapBudget& budget, std::uint64_t seed) {
  const int d = shared_dimension(families);
  require(d == joint_spec.d, "families and joint spec disagree on d");
  require(marginal_specs.size() == families.size(), "one marginal spec per family is required");
  require(budget.candidates >= 0, "candidate count must be >= 0");
  for (std::size_t k = 0; k < families.size(); ++k) {
    const auto [li, ri] = family_indices(families, k);
    const auto& ms = marginal_specs[k];
    require(ms.d == d && ms.M == joint_spec.M && ms.epsilon == joint_spec.epsilon,
            "marginal specs must share d, M and epsilon with the joint spec");
    require(ms.target.table() == joint_spec.target.restricted(li, ri).table(),
            "marginal target " + std::to_string(k + 1) + " is not the restriction of the joint target");
  }

  OrbitalGapReport report;
  report.d = d;
  report.joint = estimate_log_volume(joint_spec, HsBallSampler{}, budget.volume_samples, derive_seed(seed, 1));

  std::vector<std::vector<MicrostateTuple>> hits(families.size());
  for (std::size_t k = 0; k < families.size(); ++k) {
    report.marginals.push_back(estimate_log_volume(marginal_specs[k], HsBallSampler{}, budget.volume_samples,
                                                   derive_seed(seed, 100 + k), hits[k],
                                                   static_cast<std::size_t>(budget.candidates)));
  }

  std::vector<FamilyTuple> candidates{families};
  for (int j = 0; j < budget.candidates; ++j) {
    FamilyTuple c;
    bool complete = true;
    for (const auto& h : hits) {
      if (static_cast<std::size_t>(j) >= h.size()) {
        complete = false;
        break;
      }
      c.push_back(h[static_cast<std::size_t>(j)]);
    }
    if (!complete) break;
    candidates.push_back(std::move(c));
  }
  const std::uint64_t orbital_seed = derive_seed(seed, 2);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const OrbitalEstimate e = orbital_hit_probability(candidates[c], joint_spec.target, joint_spec.M,
                                                      joint_spec.epsilon, budget.orbital_samples, orbital_seed);
    if (c == 0 || e.hit_probability > report.orbital.hit_probability) {
      report.orbital = e;
      report.best_candidate = static_cast<int>(c);
    }
  }

  report.chi_joint = report.joint.normalized_chi;
  report.chi_orb = report.orbital.normalized;
  ExtendedReal sum(0.0);
  double var = std::pow(report.joint.normalized_std_error(), 2) + std::pow(report.orbital.normalized_std_error(), 2);
  for (const auto& m : report.marginals) {
    sum = sum + m.normalized_chi;
    var += std::pow(m.normalized_std_error(), 2);
  }
  report.chi_marginals = sum;
  const ExtendedReal upper = report.chi_orb + report.chi_marginals;
  if (report.chi_joint.is_neg_infinity()) {
    report.gap = upper.is_neg_infinity() ? std::numeric_limits<double>::quiet_NaN() : kInf;
    report.std_error = kInf;
    // Nothing to violate: an empty joint set satisfies every upper bound.
    report.consistent = true;
  } else if (upper.is_neg_infinity()) {
    report.gap = -kInf;
    report.std_error = kInf;
    report.consistent = false;
  } else {
    report.gap = upper.value() - report.chi_joint.value();
    report.std_error = std::sqrt(var);
    report.consistent = report.gap >= -3.0 * report.std_error;
  }
  return report;
}

}  // namespace bifree
