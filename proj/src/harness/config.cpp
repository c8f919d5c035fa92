#include "bifree/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace bifree {
namespace {

using nlohmann::json;

const std::set<std::string> kExperiments = {"oracle",    "mc-entropy", "orbital",      "freeness",
                                            "dimension", "moments",    "validate-gram"};
const std::set<std::string> kFields = {"experiment", "n",         "m",        "ell",      "covariance", "moment_file",
                                       "M",          "epsilon",   "R",        "d_list",   "samples",    "seed",
                                       "output",     "eps_grid",  "mode",     "filter",   "sampler",    "N",
                                       "c",          "families",  "projections", "allow_high_degree"};

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

template <typename T>
T get_as(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    fail(std::string("config field '") + key + "' has the wrong type");
  }
}

void check(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  check(doc.is_object(), "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    check(kFields.contains(key), "unknown config field '" + key + "'");
  }
  check(doc.contains("experiment"), "config field 'experiment' is required");
  ExperimentConfig c;
  c.experiment = get_as<std::string>(doc, "experiment");
  check(kExperiments.contains(c.experiment), "unknown experiment '" + c.experiment + "'");

  if (doc.contains("n")) c.n = get_as<int>(doc, "n");
  if (doc.contains("m")) c.m = get_as<int>(doc, "m");
  if (doc.contains("ell")) c.ell = get_as<int>(doc, "ell");
  if (doc.contains("covariance")) {
    c.covariance = get_as<std::vector<std::vector<double>>>(doc, "covariance");
    // Without n and m, every variable is a left variable.
    if (!doc.contains("n") && !doc.contains("m")) {
      c.n = static_cast<int>(c.covariance->size());
      c.m = 0;
    }
  }
  if (doc.contains("moment_file")) c.moment_file = get_as<std::string>(doc, "moment_file");
  if (doc.contains("M")) c.M = get_as<int>(doc, "M");
  if (doc.contains("epsilon")) c.epsilon = get_as<double>(doc, "epsilon");
  if (doc.contains("R")) {
    const json& r = doc.at("R");
    if (r.is_string()) {
      check(r.get<std::string>() == "inf", "R must be a positive number or \"inf\"");
      c.R = std::numeric_limits<double>::infinity();
    } else {
      c.R = get_as<double>(doc, "R");
    }
  }
  if (doc.contains("d_list")) c.d_list = get_as<std::vector<int>>(doc, "d_list");
  if (doc.contains("samples")) c.samples = get_as<std::int64_t>(doc, "samples");
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc, "seed");
  if (doc.contains("output")) c.output = get_as<std::string>(doc, "output");
  if (doc.contains("eps_grid")) c.eps_grid = get_as<std::vector<double>>(doc, "eps_grid");
  if (doc.contains("mode")) c.mode = get_as<std::string>(doc, "mode");
  if (doc.contains("filter")) c.filter = get_as<std::vector<std::string>>(doc, "filter");
  if (doc.contains("sampler")) {
    const json& s = doc.at("sampler");
    check(s.is_object(), "sampler must be an object");
    for (const auto& [key, value] : s.items()) {
      check(key == "kind" || key == "radius" || key == "variance", "unknown sampler field '" + key + "'");
    }
    if (s.contains("kind")) c.sampler.kind = get_as<std::string>(s, "kind");
    if (s.contains("radius")) c.sampler.radius = get_as<double>(s, "radius");
    if (s.contains("variance")) c.sampler.variance = get_as<double>(s, "variance");
  }
  if (doc.contains("N")) {
    const json& nn = doc.at("N");
    c.N = nn.is_array() ? get_as<std::vector<int>>(doc, "N") : std::vector<int>{get_as<int>(doc, "N")};
  }
  if (doc.contains("c")) c.c = get_as<double>(doc, "c");
  if (doc.contains("families")) {
    const json& fs = doc.at("families");
    check(fs.is_array(), "families must be an array of {n, m} objects");
    for (const auto& f : fs) {
      check(f.is_object() && f.contains("n") && f.contains("m") && f.size() == 2,
            "families entries must be {\"n\": .., \"m\": ..}");
      c.families.push_back({get_as<int>(f, "n"), get_as<int>(f, "m")});
    }
  }
  // ell counts the families; given alone it only has to be positive.
  if (!c.families.empty()) {
    const int count = static_cast<int>(c.families.size());
    check(!doc.contains("ell") || c.ell == count, "ell must equal the number of families");
    c.ell = count;
  }
  if (doc.contains("projections")) c.projections = get_as<int>(doc, "projections");
  if (doc.contains("allow_high_degree")) c.allow_high_degree = get_as<bool>(doc, "allow_high_degree");

  check(c.n >= 0 && c.m >= 0, "n and m must be non-negative");
  check(c.ell >= 1, "ell must be >= 1");
  check(c.M >= 1, "M must be >= 1");
  check(c.epsilon > 0.0 && std::isfinite(c.epsilon), "epsilon must be positive");
  check(c.R > 0.0, "R must be positive");
  check(c.samples >= 1, "samples must be >= 1");
  for (int d : c.d_list) check(d >= 1, "d_list entries must be >= 1");
  for (double e : c.eps_grid) check(e > 0.0, "eps_grid entries must be positive");
  check(c.mode == "bifree-reduced" || c.mode == "free-interleaved" || c.mode == "filter",
        "mode must be bifree-reduced, free-interleaved or filter");
  check(c.sampler.kind == "hs_ball" || c.sampler.kind == "gue", "sampler kind must be hs_ball or gue");
  check(!c.sampler.radius || *c.sampler.radius > 0.0, "sampler radius must be positive");
  check(c.sampler.variance > 0.0, "sampler variance must be positive");
  for (int n : c.N) check(n >= 2, "validate-gram N must be >= 2");
  check(c.projections >= 1, "projections must be >= 1");
  if (c.covariance) {
    const auto& rows = *c.covariance;
    for (const auto& r : rows) check(r.size() == rows.size(), "covariance must be a square matrix");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["experiment"] = c.experiment;
  doc["n"] = c.n;
  doc["m"] = c.m;
  doc["ell"] = c.ell;
  if (c.covariance) doc["covariance"] = *c.covariance;
  if (c.moment_file) doc["moment_file"] = *c.moment_file;
  doc["M"] = c.M;
  doc["epsilon"] = c.epsilon;
  if (std::isinf(c.R)) {
    doc["R"] = "inf";
  } else {
    doc["R"] = c.R;
  }
  doc["d_list"] = c.d_list;
  doc["samples"] = c.samples;
  doc["seed"] = c.seed;
  doc["output"] = c.output;
  doc["eps_grid"] = c.eps_grid;
  doc["mode"] = c.mode;
  doc["filter"] = c.filter;
  json s;
  s["kind"] = c.sampler.kind;
  if (c.sampler.radius) s["radius"] = *c.sampler.radius;
  s["variance"] = c.sampler.variance;
  doc["sampler"] = s;
  doc["N"] = c.N;
  doc["c"] = c.c;
  json fams = json::array();
  for (const auto& f : c.families) fams.push_back({{"n", f.n}, {"m", f.m}});
  doc["families"] = fams;
  doc["projections"] = c.projections;
  doc["allow_high_degree"] = c.allow_high_degree;
  return doc;
}

RealMatrix covariance_matrix(const ExperimentConfig& config) {
  if (!config.covariance) throw ConfigError("this experiment needs a covariance");
  const auto& rows = *config.covariance;
  const auto k = static_cast<Eigen::Index>(rows.size());
  check(k >= 1, "covariance is empty");
  RealMatrix a(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    check(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) == k, "covariance must be square");
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return a;
}

std::string config_hash(const ExperimentConfig& config) {
  // The output location is where a run is stored, not what it computes.
  nlohmann::json doc = to_json(config);
  doc.erase("output");
  const std::string canonical = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bifree
