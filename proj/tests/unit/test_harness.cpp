#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bifree/harness.hpp"

using namespace bifree;
using nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("bifree_harness_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

RunOutcome run_json(const json& doc, const std::filesystem::path& out) {
  return run_experiment(parse_config(doc), RunOptions{std::nullopt, out.string()});
}

}  // namespace

TEST_CASE("config parsing") {
  const json doc = {{"experiment", "mc-entropy"},
                    {"n", 1},
                    {"m", 1},
                    {"covariance", {{1, 0.5}, {0.5, 1}}},
                    {"M", 2},
                    {"epsilon", 0.1},
                    {"R", "inf"},
                    {"d_list", {2, 3}},
                    {"samples", 1000},
                    {"seed", 5},
                    {"mode", "filter"},
                    {"filter", {"X1X1|", "|Y1Y1", "X1|Y1"}},
                    {"sampler", {{"kind", "gue"}, {"variance", 1.0}}}};
  const ExperimentConfig c = parse_config(doc);
  CHECK(std::isinf(c.R));
  CHECK(c.sampler.kind == "gue");
  CHECK(parse_config(to_json(c)) == c);
  CHECK(config_hash(c) == config_hash(parse_config(to_json(c))));
  ExperimentConfig moved = c;
  moved.output = "elsewhere";
  CHECK(config_hash(moved) == config_hash(c));
  moved.seed = 6;
  CHECK(config_hash(moved) != config_hash(c));

  CHECK_THROWS_AS(parse_config({{"experiment", "nope"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"experiment", "oracle"}, {"colour", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"experiment", "oracle"}, {"epsilon", -1}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"experiment", "oracle"}, {"R", "big"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"n", 1}}), ConfigError);
  const nlohmann::json two = nlohmann::json::array({{{"n", 1}, {"m", 0}}, {{"n", 1}, {"m", 0}}});
  CHECK(parse_config({{"experiment", "orbital"}, {"families", two}}).ell == 2);
  CHECK_THROWS_AS(parse_config({{"experiment", "orbital"}, {"families", two}, {"ell", 3}}), ConfigError);

  const ExperimentConfig inferred = parse_config({{"experiment", "dimension"}, {"covariance", {{1, 1}, {1, 1}}}});
  CHECK(inferred.n == 2);
  CHECK(inferred.m == 0);
}

TEST_CASE("oracle and dimension runs") {
  const auto dir = fresh_dir("oracle");
  const auto o = run_json({{"experiment", "oracle"}, {"n", 1}, {"m", 1}, {"covariance", {{1, 0.5}, {0.5, 1}}}}, dir);
  CHECK(o.exit_code == kExitOk);
  CHECK(o.record.at("summary").at("chi").get<double>() == doctest::Approx(2.6941).epsilon(1e-4));

  const auto d = run_json({{"experiment", "dimension"},
                           {"covariance", {{1, 1}, {1, 1}}},
                           {"eps_grid", {1e-4, 1e-6, 1e-8}}},
                          dir);
  CHECK(d.exit_code == kExitOk);
  CHECK(std::abs(d.record.at("summary").at("delta").get<double>() - 1.0) < 0.05);

  std::ostringstream csv;
  export_csv(*find_run(dir, d.run_id), csv);
  CHECK(csv.str().rfind("epsilon,chi,fitted_delta\n", 0) == 0);
  CHECK(read_ledger(dir).size() == 2);
}

TEST_CASE("reruns reproduce rows and get new ids") {
  const auto dir = fresh_dir("determinism");
  const json cfg = {{"experiment", "mc-entropy"}, {"n", 1},        {"m", 0},
                    {"covariance", {{1.0}}},      {"M", 2},        {"epsilon", 0.2},
                    {"d_list", {2, 3}},           {"samples", 3000}, {"seed", 17}};
  const auto a = run_json(cfg, dir);
  const auto b = run_json(cfg, dir);
  CHECK(a.exit_code == kExitOk);
  CHECK(a.record.at("rows").dump() == b.record.at("rows").dump());
  CHECK(a.run_id != b.run_id);
  CHECK(a.record.at("config_hash") == b.record.at("config_hash"));

  const auto c = run_experiment(parse_config(cfg), RunOptions{18, dir.string()});
  CHECK(c.record.at("seed_provenance") == "command line");
  CHECK(c.record.at("rows").dump() != a.record.at("rows").dump());

  std::ostringstream csv;
  export_csv(a.record, csv);
  CHECK(csv.str().rfind("d,log_volume,std_error,normalized_chi\n", 0) == 0);
}

TEST_CASE("pair experiments need a validated Gram constant first") {
  const auto dir = fresh_dir("gate");
  const json pair = {{"experiment", "mc-entropy"},
                     {"n", 1},
                     {"m", 1},
                     {"covariance", {{1, 0.5}, {0.5, 1}}},
                     {"mode", "filter"},
                     {"filter", {"X1X1|", "|Y1Y1", "X1|Y1"}},
                     {"epsilon", 0.2},
                     {"d_list", {2}},
                     {"samples", 2000}};
  CHECK(run_json(pair, dir).exit_code == kExitPrecondition);
  CHECK_FALSE(gram_validated(dir));
  const auto g = run_json({{"experiment", "validate-gram"}, {"N", {3}}, {"samples", 100000}}, dir);
  CHECK(g.exit_code == kExitOk);
  CHECK(gram_validated(dir));
  const auto p = run_json(pair, dir);
  CHECK(p.exit_code == kExitOk);
  CHECK(p.record.at("rows").at(0).contains("pair_oracle_log_volume"));
}

TEST_CASE("zero hits everywhere has its own exit code") {
  const auto dir = fresh_dir("zero");
  const auto file = dir / "bad.moments";
  std::ofstream(file) << "1 0 4\n1 0 1 0\n2 0 1 1 1\n3 0 1 1 1 0\n4 0 1 1 1 1 0\n";
  const auto r = run_json({{"experiment", "mc-entropy"},
                           {"n", 1},
                           {"m", 0},
                           {"moment_file", file.string()},
                           {"M", 4},
                           {"mode", "filter"},
                           {"filter", {"X1X1|", "X1X1X1X1|"}},
                           {"d_list", {2}},
                           {"samples", 2000}},
                          dir);
  CHECK(r.exit_code == kExitZeroHits);
  std::ostringstream csv;
  export_csv(r.record, csv);
  CHECK(csv.str().find("-inf") != std::string::npos);
}

TEST_CASE("moments export writes a moment file") {
  const auto dir = fresh_dir("moments");
  const auto r = run_json({{"experiment", "moments"}, {"n", 1}, {"m", 1}, {"covariance", {{1, 0.5}, {0.5, 1}}}, {"M", 4}},
                          dir);
  CHECK(r.exit_code == kExitOk);
  CHECK(std::filesystem::exists(dir / (r.run_id + ".moments")));
  CHECK(r.record.at("rows").size() == 2 + 3 + 4 + 5);
}

TEST_CASE("unusable covariance is a config error") {
  const auto dir = fresh_dir("bad");
  CHECK_THROWS_AS(run_json({{"experiment", "oracle"}, {"n", 1}, {"m", 1}, {"covariance", {{1, 2}, {2, 1}}}}, dir),
                  ConfigError);
  CHECK(read_ledger(dir).empty());
}
