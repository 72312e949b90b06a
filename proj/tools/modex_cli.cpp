// Command-line front end: train | eval | verify | report.
//
// Exit codes: 0 success; 1 verification failure or unexpected error;
// 2 configuration/usage error; 3 training divergence; 4 checkpoint missing
// or incompatible; 5 empty results directory.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "modex/config.hpp"
#include "modex/experiment.hpp"
#include "modex/nnet.hpp"
#include "modex/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitCheckpoint = 4;
constexpr int kExitEmptyResults = 5;

int cmd_train(const std::string& config_path, const std::string& out_dir) {
  modex::RunConfig cfg;
  try {
    cfg = modex::RunConfig::parse_file(config_path);
  } catch (const modex::ConfigError& err) {
    std::cerr << err.what() << '\n';
    return kExitConfig;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  try {
    const modex::TrainOutputs outputs = modex::run_training(cfg);
    std::cout << "checkpoint: " << outputs.checkpoint_path << '\n'
              << "history:    " << outputs.history_path << '\n';
    return kExitOk;
  } catch (const std::runtime_error& err) {
    std::cerr << err.what() << '\n';
    return std::string(err.what()).find("diverged") != std::string::npos
               ? kExitDiverged
               : kExitFailure;
  }
}

int cmd_eval(const std::string& checkpoint_path, const std::string& config_path,
             const std::string& out_dir) {
  modex::RunConfig cfg;
  try {
    cfg = modex::RunConfig::parse_file(config_path);
  } catch (const modex::ConfigError& err) {
    std::cerr << err.what() << '\n';
    return kExitConfig;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  modex::ModelState model;
  try {
    model = modex::load_checkpoint(checkpoint_path);
  } catch (const std::runtime_error& err) {
    std::cerr << err.what() << '\n';
    return kExitCheckpoint;
  }
  try {
    const auto rows = modex::run_evaluation(cfg, model);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string stem =
        cfg.out_dir + "/" + cfg.method + "_seed" + std::to_string(cfg.seed) +
        "_results";
    modex::write_results(rows, stem + ".csv", stem + ".json");
    std::cout << "results: " << stem << ".csv\n";
    return kExitOk;
  } catch (const std::invalid_argument& err) {
    std::cerr << err.what() << '\n';
    return kExitCheckpoint;
  } catch (const std::runtime_error& err) {
    std::cerr << err.what() << '\n';
    return kExitFailure;
  }
}

int cmd_verify(int trials, std::uint64_t seed) {
  if (trials < 1) {
    std::cerr << "verify: --trials must be >= 1\n";
    return kExitConfig;
  }
  modex::VerifyOptions opts;
  opts.trials = trials;
  opts.seed = seed;
  const modex::VerifyReport report = modex::run_verify(opts);
  std::printf("%-26s %6s %9s %12s  %s\n", "check", "runs", "failures", "worst",
              "status");
  for (const modex::CheckSummary& c : report.checks) {
    std::printf("%-26s %6d %9d %12.3e  %s\n", c.name.c_str(), c.runs,
                c.failures, c.worst, c.failures == 0 ? "pass" : "FAIL");
  }
  for (const modex::CheckSummary& c : report.checks) {
    if (c.failures > 0) {
      std::printf("failing check %s, worst offender: %s\n", c.name.c_str(),
                  c.worst_example.c_str());
    }
  }
  return report.all_passed() ? kExitOk : kExitFailure;
}

int cmd_report(const std::string& results_dir) {
  try {
    std::string table;
    modex::write_report(results_dir, table);
    std::cout << table;
    std::cout << "written: " << results_dir << "/report.md\n";
    return kExitOk;
  } catch (const std::runtime_error& err) {
    std::cerr << err.what() << '\n';
    return kExitEmptyResults;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixture-of-Dirichlet-experts uncertainty quantification"};
  app.require_subcommand(1);

  std::string config_path;
  std::string checkpoint_path;
  std::string out_dir;
  int trials = 1000;
  std::uint64_t seed = modex::VerifyOptions{}.seed;

  CLI::App* train = app.add_subcommand("train", "train a model from a config");
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--out", out_dir, "output directory override");

  CLI::App* eval = app.add_subcommand("eval", "run evaluation tasks on a checkpoint");
  eval->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
  eval->add_option("--config", config_path, "config file")->required();
  eval->add_option("--out", out_dir, "output directory override");

  CLI::App* verify = app.add_subcommand("verify", "run the identity suite");
  verify->add_option("--trials", trials, "number of random parameter draws");
  verify->add_option("--seed", seed, "base seed");

  CLI::App* report = app.add_subcommand("report", "aggregate result CSVs");
  report->add_option("--out", out_dir, "directory of result CSVs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, out_dir);
    if (eval->parsed()) return cmd_eval(checkpoint_path, config_path, out_dir);
    if (verify->parsed()) return cmd_verify(trials, seed);
    if (report->parsed()) return cmd_report(out_dir);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}
