#pragma once

#include <string>
#include <vector>

namespace psrl::harness {

// Deterministic text table over a finished run directory: per-episode
// regret, suffix failure, minimum action frequency and token summaries.
std::string format_stats(const std::string& run_dir);

// Plot-ready CSV: the aggregate rows of one run directory, or of every run
// directory directly below `in`. Returns the number of runs exported.
std::size_t export_csv(const std::string& in, const std::string& out_path);

struct ReplayReport {
  std::size_t records = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// Re-renders every templated prompt of trial `trial` from its recorded
// bindings with the run's templates and checks each record digest.
ReplayReport replay_trial(const std::string& run_dir, std::size_t trial);

}  // namespace psrl::harness
