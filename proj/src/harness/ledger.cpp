#include <cstdio>
#include <fstream>

#include "bifree/harness.hpp"

namespace bifree {

using nlohmann::json;

std::filesystem::path ledger_path(const std::filesystem::path& out_dir) { return out_dir / "ledger.jsonl"; }

std::vector<json> read_ledger(const std::filesystem::path& out_dir) {
  std::vector<json> out;
  std::ifstream in(ledger_path(out_dir));
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(json::parse(line));
  }
  return out;
}

void append_record(const std::filesystem::path& out_dir, const json& record) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(ledger_path(out_dir), std::ios::app);
  if (!out) throw std::runtime_error("cannot append to ledger in " + out_dir.string());
  out << record.dump() << '\n';
}

std::optional<json> find_run(const std::filesystem::path& out_dir, const std::string& run_id) {
  for (auto& rec : read_ledger(out_dir)) {
    if (rec.value("run_id", "") == run_id) return rec;
  }
  return std::nullopt;
}

bool gram_validated(const std::filesystem::path& out_dir) {
  for (const auto& rec : read_ledger(out_dir)) {
    if (rec.value("experiment", "") == "validate-gram" && rec.value("status", "") == "ok") return true;
  }
  return false;
}

std::vector<std::string> csv_columns(const std::string& experiment) {
  if (experiment == "mc-entropy") return {"d", "log_volume", "std_error", "normalized_chi"};
  if (experiment == "orbital") return {"d", "hit_probability", "std_error", "normalized"};
  if (experiment == "dimension") return {"epsilon", "chi", "fitted_delta"};
  if (experiment == "oracle") return {"quantity", "d", "value"};
  if (experiment == "validate-gram") return {"N", "mc_log_volume", "std_error", "oracle_log_volume", "z_score", "pass"};
  if (experiment == "freeness") return {"d", "fraction", "trials"};
  if (experiment == "moments") return {"word", "real", "imag"};
  return {};
}

namespace {

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  return v.dump();
}

}  // namespace

void export_csv(const json& record, std::ostream& out) {
  const auto columns = csv_columns(record.value("experiment", ""));
  for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
  out << '\n';
  if (!record.contains("rows")) return;
  for (const auto& row : record.at("rows")) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      out << (k ? "," : "");
      if (row.contains(columns[k])) out << cell(row.at(columns[k]));
    }
    out << '\n';
  }
}

}  // namespace bifree
