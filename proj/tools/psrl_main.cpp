#include <filesystem>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "psrl/core/errors.hpp"
#include "psrl/harness/config.hpp"
#include "psrl/harness/report.hpp"
#include "psrl/harness/runner.hpp"

namespace {

using namespace psrl;
using namespace psrl::harness;

int run_command(const std::string& config_path, const RunOptions& options) {
  const ExperimentConfig config = load_config(config_path);
  const RunSummary s = run_experiment(config, options);
  std::cout << fmt::format("{}: {} done, {} failed, {} aborted ({} run now, {} already finished)\n", s.output_dir,
                           s.done, s.failed, s.aborted, s.executed, s.skipped);
  return s.failed + s.aborted == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posterior sampling agents driven by language models"};
  app.require_subcommand(1);

  std::string config_path, in_dir, out_path;
  std::size_t trial = 1;
  RunOptions options;
  options.progress = &std::cerr;

  auto* run = app.add_subcommand("run", "Run or resume an experiment");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--trials", options.trials, "Number of trials");
  run->add_option("--seed", options.seed, "Master seed");
  run->add_option("--out", options.output_dir, "Output directory");
  run->add_option("--parallel", options.parallel, "Concurrent trials");
  run->add_flag("--yes", options.cost_confirmed, "Confirm the estimated cost of a live run");

  auto* stats = app.add_subcommand("stats", "Print the aggregate table of a run");
  stats->add_option("--in", in_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  auto* exp = app.add_subcommand("export", "Write plot-ready aggregate CSV");
  exp->add_option("--in", in_dir, "Run directory, or a directory of runs")->required()->check(CLI::ExistingDirectory);
  exp->add_option("--out", out_path, "Output CSV path")->required();

  auto* replay = app.add_subcommand("replay", "Verify a trial transcript against its templates");
  replay->add_option("--in", in_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  replay->add_option("--trial", trial, "Trial number (1-based)")->required();

  auto* validate = app.add_subcommand("validate", "Check a config and list every problem");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, options);
    if (*stats) {
      std::cout << format_stats(in_dir);
      return 0;
    }
    if (*exp) {
      const std::size_t n = export_csv(in_dir, out_path);
      std::cout << fmt::format("wrote {} ({} run{})\n", out_path, n, n == 1 ? "" : "s");
      return 0;
    }
    if (*replay) {
      const ReplayReport r = replay_trial(in_dir, trial);
      for (const auto& m : r.mismatches) std::cout << m << '\n';
      std::cout << fmt::format("trial {}: {} records, {} mismatches: {}\n", trial, r.records, r.mismatches.size(),
                               r.ok() ? "ok" : "FAILED");
      return r.ok() ? 0 : 1;
    }
    if (*validate) {
      const ExperimentConfig c = load_config(config_path);
      std::cout << fmt::format("{}: ok ({} on {}, {} trials of {} episodes, horizon {})\n", config_path, c.agent.id,
                               c.environment.id, c.trials, c.budget.episodes, c.budget.horizon);
      return 0;
    }
  } catch (const CostConfirmationRequired& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
