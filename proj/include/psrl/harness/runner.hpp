#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "psrl/harness/config.hpp"
#include "psrl/planning/lock_planner.hpp"

namespace psrl::harness {

// One row of a trial's episodes.csv. Bandit-only columns are empty elsewhere.
struct EpisodeRow {
  std::string experiment;
  std::string agent;
  std::string environment;
  std::size_t trial = 0;
  std::size_t episode = 0;  // 1-based
  double regret = 0.0;      // expected where true parameters allow, else realized
  double cumulative_regret = 0.0;
  double realized_regret = 0.0;
  bool solved = false;
  std::size_t unsolved_episodes = 0;  // cumulative count
  std::optional<int> suffix_failure;
  std::optional<double> min_action_frequency;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::string action;  // actions of the episode joined by a space
};

std::string episodes_csv_header();
std::string to_csv_line(const EpisodeRow& row);
std::vector<EpisodeRow> parse_episodes_csv(const std::string& text);

struct TrialResult {
  std::size_t trial = 0;  // 1-based
  std::string status;     // done, failed, aborted
  std::string error;
  std::vector<EpisodeRow> rows;
  TokenLedger ledger;
  std::map<std::string, std::size_t> calls;  // LLM agents only
  std::size_t reprompts = 0;
  std::size_t fallbacks = 0;
  std::size_t cache_hits = 0;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

// Resources shared by the trials of one run.
struct TrialResources {
  const llm::TemplateRegistry* registry = nullptr;  // run registry with overrides
  std::shared_ptr<llm::ChatBackend> shared_backend;  // live backends only
  std::shared_ptr<LockPlanner> planner;              // one per worker thread
};

// The registry holding the built-in templates plus the config's overrides.
llm::TemplateRegistry build_registry(const ExperimentConfig& config);

// Runs one seeded trial. With a non-empty trial_dir the transcript,
// episodes.csv, tokens.csv and status.json are written there.
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial, const TrialResources& resources,
                      const std::string& trial_dir = "");

struct RunOptions {
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallel;
  std::string output_dir;          // overrides the config's output_dir
  bool cost_confirmed = false;     // the --yes gate for live backends
  std::ostream* progress = nullptr;
};

struct RunSummary {
  std::string output_dir;
  std::size_t done = 0;
  std::size_t failed = 0;
  std::size_t aborted = 0;
  std::size_t skipped = 0;  // finished in an earlier invocation
  std::size_t executed = 0;
};

class CostConfirmationRequired : public Error {
 public:
  explicit CostConfirmationRequired(double dollars);
  double dollars() const { return dollars_; }

 private:
  double dollars_;
};

// Dollar estimate from the reference per-episode token averages at the
// configured prices, over every trial and episode.
double estimate_cost(const ExperimentConfig& config);

// Writes the manifest, runs unfinished trials, then the run-level
// episodes.csv, aggregate.csv and tokens.csv. Trials whose status.json
// says done are skipped; any other trial directory is cleared and rerun.
RunSummary run_experiment(ExperimentConfig config, const RunOptions& options = {});

std::string trial_dir_name(std::size_t trial);

// Quotes a CSV field when it holds a comma, quote or line break.
std::string csv_field(const std::string& s);
// Records of fields, honouring quoted fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace psrl::harness
