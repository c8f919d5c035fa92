#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "bifree/errors.hpp"
#include "bifree/harness.hpp"

using namespace bifree;

namespace {

void print_summary(const RunOutcome& outcome) {
  std::cout << "run " << outcome.run_id << " status " << outcome.record.value("status", "") << '\n';
  for (const auto& row : outcome.record.at("rows")) std::cout << "  " << row.dump() << '\n';
  if (!outcome.message.empty()) std::cerr << outcome.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bi-free microstate entropy lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out, "Output directory holding ledger.jsonl");

  std::string run_id;
  std::string format = "csv";
  std::string runs_dir = "runs";
  std::optional<std::string> output_file;
  auto* exp = app.add_subcommand("export", "Export the rows of a recorded run");
  exp->add_option("--run", run_id, "Run id")->required();
  exp->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));
  exp->add_option("--out", runs_dir, "Directory holding ledger.jsonl");
  exp->add_option("--output", output_file, "Write to this file instead of stdout");

  std::vector<int> dims{3, 4};
  std::int64_t samples = 1000000;
  std::uint64_t gram_seed = 1;
  std::string gram_out = "runs";
  double epsilon = 0.3;
  double c = 0.2;
  auto* gram = app.add_subcommand("validate-gram", "Check the Gram-Jacobian constant by brute force");
  gram->add_option("--N", dims, "Ambient dimensions")->expected(1, -1);
  gram->add_option("--samples", samples, "Samples per dimension");
  gram->add_option("--seed", gram_seed, "Seed");
  gram->add_option("--out", gram_out, "Output directory holding ledger.jsonl");
  gram->add_option("--epsilon", epsilon, "Window half-width");
  gram->add_option("--c", c, "Inner-product window centre");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*run) {
      const RunOutcome outcome = run_experiment(load_config(config_path), RunOptions{seed, out});
      print_summary(outcome);
      return outcome.exit_code;
    }
    if (*exp) {
      const auto record = find_run(runs_dir, run_id);
      if (!record) {
        std::cerr << "no run " << run_id << " in " << ledger_path(runs_dir).string() << '\n';
        return kExitFailure;
      }
      if (output_file) {
        std::ofstream f(*output_file);
        export_csv(*record, f);
      } else {
        export_csv(*record, std::cout);
      }
      return kExitOk;
    }
    ExperimentConfig config;
    config.experiment = "validate-gram";
    config.N = dims;
    config.samples = samples;
    config.seed = gram_seed;
    config.epsilon = epsilon;
    config.c = c;
    const RunOutcome outcome = run_experiment(config, RunOptions{std::nullopt, gram_out});
    print_summary(outcome);
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
