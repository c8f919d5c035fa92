// Acceptance run: one PASS/FAIL line per criterion.
//
//   bifree_acceptance [--only 1,5,7] [--expect-fail "7:d=3 within band"]
//
// --expect-fail takes "id" (any failure of that criterion) or "id:check"
// (only that sub-check); repeatable. Exit status is 0 when every failure
// was expected.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bifree/cumulants.hpp"
#include "bifree/ensembles.hpp"
#include "bifree/entropy.hpp"
#include "bifree/microstate.hpp"
#include "bifree/moments.hpp"
#include "bifree/orbital.hpp"
#include "bifree/partitions.hpp"
#include "bifree/volume_oracles.hpp"
#include "bifree/words.hpp"

using namespace bifree;

namespace {

const double kLog2PiE = std::log(2 * std::numbers::pi * std::numbers::e);

// Tolerances and budgets.
constexpr double kOracleTol = 1e-12;
constexpr double kTransformTol = 1e-10;
constexpr double kGapTol = 1e-10;
constexpr double kDeltaTol = 0.05;
constexpr double kRoundTripTol = 1e-10;
constexpr double kSigmas = 3.0;
constexpr std::int64_t kGramSamples = 10'000'000;
constexpr std::int64_t kVolumeSamples = 1'000'000;
constexpr double kTrendBand = 0.3;
constexpr double kFreenessFloor = 0.9;
constexpr std::int64_t kOrbitalSamples = 20000;

struct Outcome {
  bool pass = true;
  std::vector<std::string> failed;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failed.push_back(what);
      detail << " [failed: " << what << "]";
    }
  }
};

RealMatrix pair_cov(double c) {
  RealMatrix a(2, 2);
  a << 1.0, c, c, 1.0;
  return a;
}

RealMatrix random_psd(int k, Engine& e) {
  std::normal_distribution<double> g;
  RealMatrix f(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) f(i, j) = g(e);
  return f * f.transpose() / k;
}

RealMatrix planted_rank(int k, int rank, Engine& e) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> lam(0.5, 2.0);
  RealMatrix x(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) x(i, j) = g(e);
  const RealMatrix q = Eigen::HouseholderQR<RealMatrix>(x).householderQ();
  RealVector d = RealVector::Zero(k);
  for (int i = 0; i < rank; ++i) d(i) = lam(e);
  return q * d.asDiagonal() * q.transpose();
}

RealMatrix random_invertible(int k, Engine& e) {
  std::normal_distribution<double> g;
  for (;;) {
    RealMatrix q(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) q(i, j) = g(e);
    if (std::abs(q.determinant()) > 1e-2) return q;
  }
}

MicrostateSpec pair_filter_spec(double c, double eps, int d) {
  MicrostateSpec s{build_target(GaussianSource{CovarianceSpec(1, 1, pair_cov(c))}, 1, 1, 2), 2, eps, kNoNormCap, d,
                   MembershipMode::kFilter, {}};
  for (const char* w : {"X1X1|", "|Y1Y1", "X1|Y1"}) s.filter.push_back(ReducedWord::parse(w));
  return s;
}

// Sum over all perfect matchings of the sequence, skipping crossing ones.
double brute_wick(const RealMatrix& a, const std::vector<int>& seq) {
  if (seq.size() % 2) return 0.0;
  double total = 0.0;
  std::vector<std::pair<int, int>> cur;
  std::function<void(std::vector<int>)> rec = [&](std::vector<int> open) {
    if (open.empty()) {
      for (auto [p, q] : cur)
        for (auto [r, s] : cur)
          if (p < r && r < q && q < s) return;
      double prod = 1.0;
      for (auto [p, q] : cur) prod *= a(seq[p], seq[q]);
      total += prod;
      return;
    }
    for (std::size_t k = 1; k < open.size(); ++k) {
      std::vector<int> rest;
      for (std::size_t j = 1; j < open.size(); ++j)
        if (j != k) rest.push_back(open[j]);
      cur.emplace_back(open[0], open[k]);
      rec(rest);
      cur.pop_back();
    }
  };
  std::vector<int> pts(seq.size());
  std::iota(pts.begin(), pts.end(), 0);
  rec(pts);
  return total;
}

// 1. Gaussian oracle exactness.
Outcome gaussian_oracle() {
  Outcome o;
  double worst = 0.0;
  for (double c : {0.0, 0.25, -0.25, 0.5, -0.5, 0.9, -0.9}) {
    const double v = gaussian_chi(CovarianceSpec(1, 1, pair_cov(c))).value.value();
    worst = std::max(worst, std::abs(v - (kLog2PiE + 0.5 * std::log(1 - c * c))));
  }
  o.require(worst <= kOracleTol, "closed form");
  for (double c : {1.0, -1.0}) o.require(gaussian_chi(CovarianceSpec(1, 1, pair_cov(c))).value.is_neg_infinity(), "-inf at |c| = 1");
  o.detail << "max error " << worst;
  return o;
}

// 2. Transformation calculus.
Outcome transformation() {
  Outcome o;
  Engine e = make_engine(2002);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3, m = 1 + (trial / 3) % 2;
    const CovarianceSpec a(n, m, random_psd(n + m, e) + 0.01 * RealMatrix::Identity(n + m, n + m));
    const RealMatrix q = random_invertible(n, e), r = random_invertible(m, e);
    RealMatrix t = RealMatrix::Zero(n + m, n + m);
    t.topLeftCorner(n, n) = q;
    t.bottomRightCorner(m, m) = r;
    RealMatrix pushed = t * a.matrix() * t.transpose();
    pushed = 0.5 * (pushed + pushed.transpose());
    const double direct = gaussian_chi(CovarianceSpec(n, m, pushed)).value.value();
    worst = std::max(worst, std::abs(transform_chi(gaussian_chi(a), q, r).value.value() - direct));
  }
  o.require(worst <= kTransformTol, "pushforward agreement");
  RealMatrix singular(2, 2);
  singular << 1, 2, 2, 4;
  const ChiValue chi = gaussian_chi(CovarianceSpec(2, 1, RealMatrix::Identity(3, 3)));
  o.require(transform_chi(chi, singular, RealMatrix::Identity(1, 1)).value.is_neg_infinity(), "singular Q gives -inf");
  o.require(transform_chi(chi, RealMatrix::Identity(2, 2), RealMatrix::Zero(1, 1)).value.is_neg_infinity(),
            "singular Rm gives -inf");
  o.detail << "100 instances, max error " << worst;
  return o;
}

// 3. Inequality suite.
Outcome inequalities() {
  Outcome o;
  Engine e = make_engine(3003);
  double min_gap = INFINITY, max_block_gap = 0.0;
  int bound_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 3, m = 1 + (trial / 3) % 3;
    const CovarianceSpec a(n, m, random_psd(n + m, e));
    const int p = trial % (n + 1), q = (trial / 7) % (m + 1);
    min_gap = std::min(min_gap, subadditivity_gap(a, p, q));
    std::vector<double> diag;
    for (int k = 0; k < n + m; ++k) diag.push_back(a(k, k));
    if (!(gaussian_chi(a).value <= chi_upper_bound(diag))) ++bound_violations;

    // Zero the cross block between {lefts < p, rights < q} and the rest.
    RealMatrix b = a.matrix();
    auto in_first = [&](int k) { return k < n ? k < p : k - n < q; };
    for (int i = 0; i < n + m; ++i)
      for (int j = 0; j < n + m; ++j)
        if (in_first(i) != in_first(j)) b(i, j) = 0.0;
    max_block_gap = std::max(max_block_gap, std::abs(subadditivity_gap(CovarianceSpec(n, m, b), p, q)));
  }
  o.require(min_gap >= -kGapTol, "gap >= 0");
  o.require(bound_violations == 0, "chi <= upper bound");
  o.require(max_block_gap <= kGapTol, "block-diagonal gap = 0");
  o.detail << "min gap " << min_gap << ", bound violations " << bound_violations << ", max block gap "
           << max_block_gap;
  return o;
}

// 4. Entropy dimension.
Outcome dimension() {
  Outcome o;
  Engine e = make_engine(4004);
  const std::vector<double> grid{1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  int rank_mismatch = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + trial % 4;
    const int rank = trial % (k + 1);
    const CovarianceSpec a(1, k - 1, planted_rank(k, rank, e));
    if (gaussian_delta(a) != rank) ++rank_mismatch;
    worst = std::max(worst, std::abs(numeric_delta(a, grid) - rank));
  }
  o.require(rank_mismatch == 0, "gaussian_delta = rank");
  o.require(worst < kDeltaTol, "numeric_delta near rank");
  for (double c : {0.0, 0.5, -0.9}) o.require(gaussian_delta(CovarianceSpec(1, 1, pair_cov(c))) == 2, "|c| < 1 gives 2");
  for (double c : {1.0, -1.0}) o.require(gaussian_delta(CovarianceSpec(1, 1, pair_cov(c))) == 1, "|c| = 1 gives 1");
  o.detail << "200 planted ranks, rank mismatches " << rank_mismatch << ", max |numeric_delta - rank| " << worst;
  return o;
}

// 5. Combinatorics.
Outcome combinatorics() {
  Outcome o;
  for (int k = 1; k <= 8; ++k) o.require(enumerate_nc_pairings(2 * k).size() == catalan(k), "Catalan count");
  Engine e = make_engine(5005);
  std::uniform_int_distribution<int> u(-2, 2);
  int words = 0, mismatches = 0;
  for (int n = 0; n <= 2; ++n)
    for (int m = 0; m <= 2; ++m) {
      if (n + m == 0) continue;
      RealMatrix f(n + m, n + m);
      for (int i = 0; i < n + m; ++i)
        for (int j = 0; j < n + m; ++j) f(i, j) = u(e);
      const RealMatrix a = f * f.transpose();
      const CovarianceSpec cov(n, m, a);
      for (const auto& w : enumerate_reduced_words(n, m, 8)) {
        ++words;
        if (gaussian_moment(cov, w) != brute_wick(a, flatten(w, n))) ++mismatches;
      }
    }
  o.require(mismatches == 0, "Wick sum equals brute force");
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int vars = 1; vars <= 2; ++vars) {
    WordTable mom;
    for (const auto& w : enumerate_words(vars, 6)) mom[w] = Complex(g(e), g(e));
    const auto back = moments_from_cumulants(free_cumulants_from_moments(mom, vars, 6));
    for (const auto& [w, v] : mom) worst = std::max(worst, std::abs(back.at(w) - v));
  }
  o.require(worst <= kRoundTripTol, "cumulant round-trip");
  o.detail << words << " words exact, " << mismatches << " mismatches, round-trip error " << worst;
  return o;
}

// 6. Gram constant validation.
Outcome gram() {
  Outcome o;
  for (int n : {3, 4}) {
    const GramValidation v = validate_gram_constant(n, kGramSamples, 6006 + n);
    o.require(std::abs(v.z_score) <= kSigmas, "N=" + std::to_string(n));
    o.detail << "N=" << n << " mc " << v.mc_log_volume << " +- " << v.std_error << " oracle " << v.oracle_log_volume
             << " z " << v.z_score << "; ";
  }
  return o;
}

// 7. MC against the pair oracle, and the trend in d.
Outcome mc_volume() {
  Outcome o;
  for (double c : {0.0, 0.5}) {
    const VolumeEstimate est = estimate_log_volume(pair_filter_spec(c, 0.1, 3), HsBallSampler{}, kVolumeSamples, 7007);
    const double oracle = pair_constraint_log_volume_oracle(3, 0.1, c);
    const double z = (est.log_volume.value() - oracle) / est.std_error;
    o.require(std::abs(z) <= kSigmas, "d=3 agreement at c=" + std::to_string(c));
    o.require(est.log_volume.value() <= cone_upper_bound(3, 0.1, c), "cone bound at c=" + std::to_string(c));
    o.detail << "c=" << c << " mc " << est.log_volume.value() << " +- " << est.std_error << " oracle " << oracle
             << " z " << z << "; ";
  }
  const std::vector<int> ds{3, 4, 5, 6, 7, 8};
  const auto c0 = chi_sequence(pair_filter_spec(0.0, 0.1, 3), ds, GueSampler{1.0}, kVolumeSamples, 7100);
  const auto c5 = chi_sequence(pair_filter_spec(0.5, 0.1, 3), ds, GueSampler{1.0}, kVolumeSamples, 7200);
  o.detail << "trend";
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const auto& a = c0[k].estimate;
    const auto& b = c5[k].estimate;
    const double va = a.normalized_chi.to_double(), vb = b.normalized_chi.to_double();
    const double sep = std::hypot(a.normalized_std_error(), b.normalized_std_error());
    o.require(std::abs(va - kLog2PiE) <= kTrendBand, "d=" + std::to_string(ds[k]) + " within band");
    o.require(va - vb > kSigmas * sep, "d=" + std::to_string(ds[k]) + " ordering");
    char buf[96];
    std::snprintf(buf, sizeof buf, " d=%d %.4f vs %.4f", ds[k], va, vb);
    o.detail << buf;
  }
  return o;
}

// 8. Jacobian pushforward.
Outcome pushforward() {
  Outcome o;
  MicrostateSpec s{build_target(GaussianSource{CovarianceSpec(1, 0, RealMatrix::Identity(1, 1))}, 1, 0, 2), 2, 0.1,
                   kNoNormCap, 2, MembershipMode::kFilter, {ReducedWord::parse("X1X1|")}};
  RealMatrix q(1, 1);
  q << 2.0;
  MicrostateSpec after = s;
  after.target = build_target(GaussianSource{CovarianceSpec(1, 0, 4.0 * RealMatrix::Identity(1, 1))}, 1, 0, 2);
  after.epsilon = 0.4;
  const PushforwardResult r = pushforward_volume_ratio(q, RealMatrix(0, 0), s, after, kVolumeSamples, 8008);
  const double z = (r.ratio - 4 * std::log(2.0)) / r.std_error;
  o.require(std::abs(z) <= kSigmas, "ratio = 4 log 2");
  o.detail << "ratio " << r.ratio << " +- " << r.std_error << " expected " << 4 * std::log(2.0) << " z " << z;
  return o;
}

// 9. Asymptotic freeness.
Outcome freeness() {
  Outcome o;
  const int d = 200;
  std::vector<double> diag(d, 0.0);
  for (int i = 0; i < d / 2; ++i) diag[static_cast<std::size_t>(i)] = 1.0;
  const HermitianMatrix p = HermitianMatrix::diagonal(diag);
  const double f = asymptotic_freeness_fraction({{p}, {p}}, 4, 0.05, 100, 9009);
  o.require(f >= kFreenessFloor, "fraction >= 0.9");
  o.detail << "fraction " << f;
  return o;
}

TargetMoments two_family_target(double c) {
  RealMatrix a = RealMatrix::Identity(4, 4);
  a(0, 1) = a(1, 0) = c;  // X1 (family 1) with X2 (family 2)
  return build_target(GaussianSource{CovarianceSpec(2, 2, a)}, 2, 2, 2);
}

// 10. Orbital trends and the subadditivity signal.
Outcome orbital() {
  Outcome o;
  const std::vector<int> ds{4, 8, 16};
  const std::vector<FamilyShape> shapes{{1, 1}, {1, 1}};
  const TargetMoments indep = two_family_target(0.0), corr = two_family_target(0.9);
  const auto si = chi_orb_sequence(standardized_gue_generator(indep, shapes), indep, 2, 0.2, ds, kOrbitalSamples, 10010);
  const auto sc = chi_orb_sequence(standardized_gue_generator(corr, shapes), corr, 2, 0.2, ds, kOrbitalSamples, 10020);
  // Upper end of the confidence interval of a normalized estimate; the
  // one-sided bound stands in when there are no hits.
  auto upper = [](const OrbitalEstimate& e) {
    return e.hits > 0 ? e.normalized.value() + kSigmas * e.normalized_std_error() : *e.one_sided_bound;
  };
  auto lower = [](const OrbitalEstimate& e) {
    return e.hits > 0 ? e.normalized.value() - kSigmas * e.normalized_std_error() : -INFINITY;
  };
  for (std::size_t k = 0; k < ds.size(); ++k) {
    if (k > 0) {
      o.require(si[k].normalized > si[k - 1].normalized, "independent increasing");
      o.require(sc[k].normalized < sc[k - 1].normalized || sc[k].normalized.is_neg_infinity(), "correlated decreasing");
    }
    o.require(upper(sc[k]) < lower(si[k]), "correlated below independent at d=" + std::to_string(ds[k]));
    o.detail << "d=" << ds[k] << " " << si[k].normalized.to_string() << " vs " << sc[k].normalized.to_string() << "; ";
  }

  for (double c : {0.0, 0.9}) {
    const TargetMoments joint = two_family_target(c);
    const int d = 4;
    const FamilyTuple fams = standardized_gue_generator(joint, shapes)(d, 10030);
    MicrostateSpec js{joint, 2, 0.2, kNoNormCap, d, MembershipMode::kBifreeReduced, {}};
    std::vector<MicrostateSpec> ms;
    for (std::size_t k = 0; k < fams.size(); ++k) {
      const auto [l, r] = family_indices(fams, k);
      MicrostateSpec s = js;
      s.target = joint.restricted(l, r);
      ms.push_back(s);
    }
    const OrbitalGapReport rep = orbital_subadditivity_gap(fams, js, ms, {kVolumeSamples, 4000, 8}, 10040);
    o.require(rep.consistent, "gap >= -3 sigma at c=" + std::to_string(c));
    o.detail << "gap(c=" << c << ") " << rep.gap << " +- " << rep.std_error << "; ";
  }
  return o;
}

// 11. Property suites.
Outcome properties() {
  Outcome o;
  Engine e = make_engine(11011);
  const TargetMoments t = build_target(GaussianSource{CovarianceSpec(1, 1, pair_cov(0.2))}, 1, 1, 4);
  const double delta = 0.05;
  std::map<ReducedWord, Complex> moved = t.table();
  std::uniform_real_distribution<double> jitter(-0.9 * delta, 0.9 * delta);
  for (auto& [w, v] : moved) v += jitter(e);
  const TargetMoments t2 = TargetMoments::from_table(1, 1, 4, moved);
  int members = 0, eps_viol = 0, m_viol = 0, pert_viol = 0, free_viol = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const MicrostateTuple x{{sample_gue(4, 1.0, e)}, {sample_gue(4, 1.0, e)}};
    const MicrostateSpec base{t, 3, 0.4, kNoNormCap, 4, MembershipMode::kBifreeReduced, {}};
    const bool in = is_microstate(x, base).member;
    members += in;
    MicrostateSpec wider = base, shallower = base, perturbed = base, free_mode = base;
    wider.epsilon = 0.45;
    shallower.M = 2;
    perturbed.target = t2;
    perturbed.epsilon += delta;
    free_mode.mode = MembershipMode::kFreeInterleaved;
    if (in && !is_microstate(x, wider).member) ++eps_viol;
    if (in && !is_microstate(x, shallower).member) ++m_viol;
    if (in && !is_microstate(x, perturbed).member) ++pert_viol;
    if (is_microstate(x, free_mode).member && !in) ++free_viol;
  }
  o.require(members > 0, "some members");
  o.require(eps_viol == 0, "monotone in epsilon");
  o.require(m_viol == 0, "monotone in M");
  o.require(pert_viol == 0, "target perturbation");
  o.require(free_viol == 0, "free inside bifree");

  // R above the target-implied norm 2 of a standard semicircular.
  MicrostateSpec rs{build_target(GaussianSource{CovarianceSpec(1, 1, pair_cov(0.3))}, 1, 1, 2), 2, 0.3, 2.5, 2,
                    MembershipMode::kBifreeReduced, {}};
  const VolumeEstimate r1 = estimate_log_volume(rs, HsBallSampler{}, 200000, 11100);
  rs.R = 4.0;
  const VolumeEstimate r2 = estimate_log_volume(rs, HsBallSampler{}, 200000, 11100);
  const double rz = (r1.log_volume.value() - r2.log_volume.value()) / std::hypot(r1.std_error, r2.std_error);
  o.require(std::abs(rz) <= kSigmas, "R-insensitivity");

  double reduction = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<HermitianMatrix> l{sample_gue(3, 1.0, e), sample_gue(3, 1.0, e)};
    std::vector<HermitianMatrix> r{sample_gue(3, 1.0, e), sample_gue(3, 1.0, e)};
    const auto words = enumerate_words(4, 5);
    const auto& seq = words[static_cast<std::size_t>(trial) * 13 % words.size()];
    LRWord w;
    for (int s : seq) w.tokens.push_back(s < 2 ? left(s) : right(s - 2));
    reduction = std::max(reduction, std::abs(eval_generalized_lr_word_complex(w, 1, 3, l, r) -
                                             eval_lr_word_complex(w, l, r)));
  }
  o.require(reduction <= 1e-12, "d1 = 1 reduction");
  o.detail << members << "/1000 members; violations eps " << eps_viol << ", M " << m_viol << ", perturbation "
           << pert_viol << ", free " << free_viol << "; R z " << rz << "; d1=1 error " << reduction;
  return o;
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.insert(std::stoi(tok));
  return out;
}

struct Expected {
  std::set<int> whole;
  std::set<std::pair<int, std::string>> checks;
  bool covers(int id, const Outcome& o) const {
    if (whole.contains(id)) return true;
    if (o.failed.empty()) return false;  // exceptions
    for (const auto& f : o.failed)
      if (!checks.contains({id, f})) return false;
    return true;
  }
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  Expected expected;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i], value = argv[i + 1];
    if (flag == "--only") {
      only = parse_list(value);
    } else if (flag == "--expect-fail") {
      const auto colon = value.find(':');
      if (colon == std::string::npos) expected.whole.insert(std::stoi(value));
      else expected.checks.insert({std::stoi(value.substr(0, colon)), value.substr(colon + 1)});
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Gaussian oracle exactness", gaussian_oracle},
      {"transformation calculus", transformation},
      {"inequality suite", inequalities},
      {"entropy dimension", dimension},
      {"combinatorics oracle equivalence", combinatorics},
      {"Gram constant validation", gram},
      {"MC against the pair oracle", mc_volume},
      {"Jacobian pushforward", pushforward},
      {"asymptotic freeness", freeness},
      {"orbital trends", orbital},
      {"property suites", properties},
  };
  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!only.empty() && !only.contains(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& err) {
      o.pass = false;
      o.detail << " [exception: " << err.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %s (%.1fs): %s\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass && !expected.covers(id, o)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
