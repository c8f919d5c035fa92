#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bifree/config.hpp"

namespace bifree {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfigError = 2,
  kExitPrecondition = 3,
  kExitZeroHits = 4,
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string run_id;
  nlohmann::json record;
  std::string message;
};

/// Validates, executes and appends one record to <out>/ledger.jsonl.
/// Config errors are thrown as ConfigError before anything is written.
RunOutcome run_experiment(ExperimentConfig config, const RunOptions& options);

/// Result rows and status of an experiment, without any timing data, so that
/// identical config and seed give identical JSON.
struct ExperimentResult {
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();
  std::string status = "ok";  // ok | zero-hits | precondition-failure | validation-failed
  std::string message;
};
ExperimentResult execute(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         const std::string& run_id);

std::filesystem::path ledger_path(const std::filesystem::path& out_dir);
std::vector<nlohmann::json> read_ledger(const std::filesystem::path& out_dir);
void append_record(const std::filesystem::path& out_dir, const nlohmann::json& record);
std::optional<nlohmann::json> find_run(const std::filesystem::path& out_dir, const std::string& run_id);

/// True once a passing validate-gram run is in the ledger of out_dir.
bool gram_validated(const std::filesystem::path& out_dir);

/// Column names used by export_csv for an experiment.
std::vector<std::string> csv_columns(const std::string& experiment);

/// Flat CSV of the record's rows with a header; -inf is written as "-inf",
/// absent values as empty cells.
void export_csv(const nlohmann::json& record, std::ostream& out);

/// Finite doubles as numbers, infinities as "inf"/"-inf", NaN as null.
nlohmann::json json_number(double x);

}  // namespace bifree
