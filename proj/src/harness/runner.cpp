#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

#include "bifree/cumulants.hpp"
#include "bifree/entropy.hpp"
#include "bifree/errors.hpp"
#include "bifree/harness.hpp"
#include "bifree/microstate.hpp"
#include "bifree/moments.hpp"
#include "bifree/orbital.hpp"
#include "bifree/volume_oracles.hpp"

namespace bifree {
namespace {

using nlohmann::json;

json extended(ExtendedReal x) { return json_number(x.to_double()); }

CovarianceSpec covariance_of(const ExperimentConfig& c) {
  const RealMatrix a = covariance_matrix(c);
  if (a.rows() != c.n + c.m) throw ConfigError("covariance must be (n+m) x (n+m)");
  return CovarianceSpec(c.n, c.m, a);
}

TargetMoments target_of(const ExperimentConfig& c) {
  if (c.moment_file) {
    if (c.covariance) throw ConfigError("give either covariance or moment_file, not both");
    return build_target(FileSource{*c.moment_file}, c.n, c.m, c.M, c.allow_high_degree);
  }
  return build_target(GaussianSource{covariance_of(c)}, c.n, c.m, c.M, c.allow_high_degree);
}

MembershipMode mode_of(const std::string& mode) {
  if (mode == "free-interleaved") return MembershipMode::kFreeInterleaved;
  if (mode == "filter") return MembershipMode::kFilter;
  return MembershipMode::kBifreeReduced;
}

void require_d_list(const ExperimentConfig& c) {
  if (c.d_list.empty()) throw ConfigError("this experiment needs a non-empty d_list");
  if (!std::is_sorted(c.d_list.begin(), c.d_list.end()) ||
      std::adjacent_find(c.d_list.begin(), c.d_list.end()) != c.d_list.end()) {
    throw ConfigError("d_list must be strictly ascending");
  }
}

bool is_pair_filter(const MicrostateSpec& spec) {
  if (spec.n() + spec.m() != 2 || spec.mode != MembershipMode::kFilter || spec.filter.size() != 3) return false;
  return spec.target.max_second_moment() == 1.0 && spec.target.second_moment(0) == 1.0 &&
         spec.target.second_moment(1) == 1.0;
}

ExperimentResult run_oracle(const ExperimentConfig& c) {
  ExperimentResult r;
  const CovarianceSpec cov = covariance_of(c);
  const ChiValue chi = gaussian_chi(cov);
  std::vector<double> diag;
  for (int k = 0; k < cov.size(); ++k) diag.push_back(cov(k, k));
  r.rows.push_back({{"quantity", "gaussian_chi"}, {"d", nullptr}, {"value", extended(chi.value)}});
  r.rows.push_back({{"quantity", "chi_upper_bound"}, {"d", nullptr}, {"value", extended(chi_upper_bound(diag))}});
  r.rows.push_back({{"quantity", "gaussian_delta"}, {"d", nullptr}, {"value", gaussian_delta(cov)}});
  for (int p = 0; p <= cov.n(); ++p) {
    for (int q = 0; q <= cov.m(); ++q) {
      if ((p == 0 && q == 0) || (p == cov.n() && q == cov.m())) continue;
      r.rows.push_back({{"quantity", "subadditivity_gap[" + std::to_string(p) + "," + std::to_string(q) + "]"},
                        {"d", nullptr},
                        {"value", json_number(subadditivity_gap(cov, p, q))}});
    }
  }
  // Finite-d pair volumes for unit-variance pairs.
  if (cov.size() == 2 && cov(0, 0) == 1.0 && cov(1, 1) == 1.0 && std::abs(cov(0, 1)) < 1.0) {
    for (int d : c.d_list) {
      const double lv = pair_constraint_log_volume_oracle(d, c.epsilon, cov(0, 1));
      const double cone = cone_upper_bound(d, c.epsilon, cov(0, 1));
      const double shift = std::log(d);
      r.rows.push_back({{"quantity", "pair_log_volume"}, {"d", d}, {"value", json_number(lv)}});
      r.rows.push_back({{"quantity", "pair_normalized_chi"}, {"d", d}, {"value", json_number(lv / (d * d) + shift)}});
      r.rows.push_back({{"quantity", "cone_upper_bound"}, {"d", d}, {"value", json_number(cone)}});
    }
  }
  r.summary["chi"] = extended(chi.value);
  return r;
}

ExperimentResult run_dimension(const ExperimentConfig& c) {
  ExperimentResult r;
  const CovarianceSpec cov = covariance_of(c);
  if (c.eps_grid.size() < 3) throw ConfigError("eps_grid needs at least 3 points");
  const double delta = numeric_delta(cov, c.eps_grid);
  for (double e : c.eps_grid) {
    r.rows.push_back({{"epsilon", e}, {"chi", json_number(perturbed_gaussian_chi(cov, e))}, {"fitted_delta", delta}});
  }
  r.summary["delta"] = delta;
  r.summary["gaussian_delta"] = gaussian_delta(cov);
  return r;
}

ExperimentResult run_moments(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                             const std::string& run_id) {
  ExperimentResult r;
  const TargetMoments t = target_of(c);
  const auto file = out_dir / (run_id + ".moments");
  write_moment_file(file, t);
  for (const auto& [w, v] : t.table()) {
    r.rows.push_back({{"word", w.to_string()}, {"real", v.real()}, {"imag", v.imag()}});
  }
  r.summary["moment_file"] = file.filename().string();
  r.summary["words"] = t.table().size();
  return r;
}

ExperimentResult run_validate_gram(const ExperimentConfig& c) {
  ExperimentResult r;
  const std::vector<int> dims = c.N.empty() ? std::vector<int>{3, 4} : c.N;
  bool all = true;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const GramValidation g =
        validate_gram_constant(dims[k], c.samples, derive_seed(c.seed, static_cast<std::uint64_t>(dims[k])), c.epsilon,
                               c.c);
    all = all && g.pass;
    r.rows.push_back({{"N", g.N},
                      {"epsilon", g.epsilon},
                      {"c", g.c},
                      {"hits", g.hits},
                      {"samples", g.samples},
                      {"mc_log_volume", json_number(g.mc_log_volume)},
                      {"std_error", json_number(g.std_error)},
                      {"oracle_log_volume", json_number(g.oracle_log_volume)},
                      {"z_score", json_number(g.z_score)},
                      {"pass", g.pass}});
  }
  if (!all) {
    r.status = "validation-failed";
    r.message = "Gram-Jacobian constant disagrees with brute force beyond 3 standard errors";
  }
  return r;
}

ExperimentResult run_mc_entropy(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  ExperimentResult r;
  require_d_list(c);
  MicrostateSpec spec{target_of(c), c.M, c.epsilon, c.R, c.d_list.front(), mode_of(c.mode), {}};
  for (const auto& w : c.filter) spec.filter.push_back(ReducedWord::parse(w));
  if (spec.mode != MembershipMode::kFilter && !spec.filter.empty()) {
    throw ConfigError("filter words are only used in filter mode");
  }
  if (c.n + c.m == 2 && !gram_validated(out_dir)) {
    throw PreconditionFailure("run validate-gram in " + out_dir.string() +
                              " before a pair mc-entropy experiment (the Gram-Jacobian constant must be validated first)");
  }
  Sampler sampler = HsBallSampler{c.sampler.radius};
  if (c.sampler.kind == "gue") sampler = GueSampler{c.sampler.variance};
  const bool pair = is_pair_filter(spec);
  bool any_hits = false;
  for (const auto& point : chi_sequence(spec, c.d_list, sampler, c.samples, c.seed)) {
    const VolumeEstimate& e = point.estimate;
    any_hits = any_hits || e.hits > 0;
    json row = {{"d", e.d},
                {"log_volume", extended(e.log_volume)},
                {"std_error", json_number(e.std_error)},
                {"hits", e.hits},
                {"samples", e.samples},
                {"reference_log_volume", json_number(e.reference_log_volume)},
                {"normalized_chi", extended(e.normalized_chi)},
                {"normalized_std_error", json_number(e.normalized_std_error())},
                {"one_sided_bound", e.one_sided_bound ? json_number(*e.one_sided_bound) : json(nullptr)}};
    if (pair) {
      if (const auto& cov = spec.target.covariance()) {
        const double cc = (*cov)(0, 1);
        row["pair_oracle_log_volume"] = json_number(pair_constraint_log_volume_oracle(e.d, c.epsilon, cc));
        if (std::abs(cc) < 1.0) row["cone_upper_bound"] = json_number(cone_upper_bound(e.d, c.epsilon, cc));
      }
    }
    r.rows.push_back(row);
  }
  r.summary["label"] = "finite-(d, M, epsilon) functional; no limit is extrapolated";
  if (!any_hits) {
    r.status = "zero-hits";
    r.message = "no sample hit the microstate set at any d";
  }
  return r;
}

ExperimentResult run_orbital(const ExperimentConfig& c) {
  ExperimentResult r;
  require_d_list(c);
  if (c.families.empty()) throw ConfigError("orbital experiments need a families list");
  std::vector<FamilyShape> shapes;
  for (const auto& f : c.families) shapes.push_back({f.n, f.m});
  const TargetMoments target = build_target(GaussianSource{covariance_of(c)}, c.n, c.m, c.M, c.allow_high_degree);
  const auto generator = standardized_gue_generator(target, shapes);
  bool any_hits = false;
  for (const auto& e : chi_orb_sequence(generator, target, c.M, c.epsilon, c.d_list, c.samples, c.seed)) {
    any_hits = any_hits || e.hits > 0;
    r.rows.push_back({{"d", e.d},
                      {"hit_probability", e.hit_probability},
                      {"std_error", json_number(e.std_error)},
                      {"hits", e.hits},
                      {"samples", e.samples},
                      {"normalized", extended(e.normalized)},
                      {"normalized_std_error", json_number(e.normalized_std_error())},
                      {"one_sided_bound", e.one_sided_bound ? json_number(*e.one_sided_bound) : json(nullptr)}});
  }
  r.summary["label"] = "finite-(d, M, epsilon) functional; no limit is extrapolated";
  if (!any_hits) {
    r.status = "zero-hits";
    r.message = "no Haar sample produced a joint microstate at any d";
  }
  return r;
}

ExperimentResult run_freeness(const ExperimentConfig& c) {
  ExperimentResult r;
  require_d_list(c);
  for (int d : c.d_list) {
    std::vector<double> diag(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d / 2; ++i) diag[static_cast<std::size_t>(i)] = 1.0;
    const HermitianMatrix p = HermitianMatrix::diagonal(diag);
    const std::vector<std::vector<HermitianMatrix>> families(static_cast<std::size_t>(c.projections), {p});
    const double fraction = asymptotic_freeness_fraction(families, c.M, c.epsilon, c.samples,
                                                         derive_seed(c.seed, static_cast<std::uint64_t>(d)));
    r.rows.push_back({{"d", d}, {"fraction", fraction}, {"trials", c.samples}});
  }
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

ExperimentResult execute(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         const std::string& run_id) {
  const std::string& e = config.experiment;
  if (e == "oracle") return run_oracle(config);
  if (e == "dimension") return run_dimension(config);
  if (e == "moments") return run_moments(config, out_dir, run_id);
  if (e == "validate-gram") return run_validate_gram(config);
  if (e == "mc-entropy") return run_mc_entropy(config, out_dir);
  if (e == "orbital") return run_orbital(config);
  if (e == "freeness") return run_freeness(config);
  throw ConfigError("unknown experiment '" + e + "'");
}

RunOutcome run_experiment(ExperimentConfig config, const RunOptions& options) {
  std::string seed_provenance = "config";
  if (options.seed) {
    config.seed = *options.seed;
    seed_provenance = "command line";
  }
  if (options.out) config.output = *options.out;
  const std::filesystem::path out_dir = config.output;
  std::filesystem::create_directories(out_dir);

  const std::string hash = config_hash(config);
  int previous = 0;
  for (const auto& rec : read_ledger(out_dir)) {
    if (rec.value("config_hash", "") == hash) ++previous;
  }
  RunOutcome outcome;
  outcome.run_id = hash + "-" + std::to_string(previous + 1);

  const std::string started = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result;
  try {
    result = execute(config, out_dir, outcome.run_id);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const PreconditionFailure& e) {
    result.status = "precondition-failure";
    result.message = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json record;
  record["run_id"] = outcome.run_id;
  record["config_hash"] = hash;
  record["config"] = to_json(config);
  record["experiment"] = config.experiment;
  record["tool_version"] = kToolVersion;
  record["started_at"] = started;
  record["wall_seconds"] = wall;
  record["seed"] = config.seed;
  record["seed_provenance"] = seed_provenance;
  record["status"] = result.status;
  record["message"] = result.message;
  record["summary"] = result.summary;
  record["rows"] = result.rows;
  append_record(out_dir, record);

  outcome.record = record;
  outcome.message = result.message;
  if (result.status == "ok") {
    outcome.exit_code = kExitOk;
  } else if (result.status == "zero-hits") {
    outcome.exit_code = kExitZeroHits;
  } else if (result.status == "validation-failed") {
    outcome.exit_code = kExitFailure;
  } else {
    outcome.exit_code = kExitPrecondition;
  }
  return outcome;
}

}  // namespace bifree
