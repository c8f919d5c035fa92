#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bifree/hermitian.hpp"

namespace bifree {

inline constexpr const char* kToolVersion = "0.1.0";

/// Malformed or inconsistent experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplerConfig {
  std::string kind = "hs_ball";  // "hs_ball" | "gue"
  std::optional<double> radius;
  double variance = 1.0;
  bool operator==(const SamplerConfig&) const = default;
};

struct FamilyShapeConfig {
  int n = 0;
  int m = 0;
  bool operator==(const FamilyShapeConfig&) const = default;
};

/// One JSON document describing a run. Fields irrelevant to the chosen
/// experiment keep their defaults.
struct ExperimentConfig {
  std::string experiment;  // oracle | mc-entropy | orbital | freeness | dimension | moments | validate-gram
  int n = 1;
  int m = 0;
  int ell = 1;
  std::optional<std::vector<std::vector<double>>> covariance;
  std::optional<std::string> moment_file;
  int M = 2;
  double epsilon = 0.1;
  double R = std::numeric_limits<double>::infinity();
  std::vector<int> d_list;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  std::string output = "runs";

  std::vector<double> eps_grid;
  std::string mode = "bifree-reduced";  // bifree-reduced | free-interleaved | filter
  std::vector<std::string> filter;      // reduced words, "X1X1|", "X1|Y1", ...
  SamplerConfig sampler;
  std::vector<int> N;                   // validate-gram dimensions
  double c = 0.2;                       // validate-gram inner-product window centre
  std::vector<FamilyShapeConfig> families;
  int projections = 2;                  // freeness: number of half-rank projections
  bool allow_high_degree = false;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and schema-checks a config; throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Covariance as a matrix; throws ConfigError when absent or not square.
RealMatrix covariance_matrix(const ExperimentConfig& config);

/// FNV-1a of the canonical (key-sorted, compact) JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace bifree
