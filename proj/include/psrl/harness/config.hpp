#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psrl/agents/llm_agents.hpp"
#include "psrl/core/types.hpp"
#include "psrl/envs/customer.hpp"
#include "psrl/llm/backends.hpp"
#include "psrl/llm/chat.hpp"
#include "psrl/metrics/metrics.hpp"

namespace psrl::harness {

struct EnvironmentConfig {
  std::string id;  // bernoulli, informative, riverswim, comblock, wordle, customer
  // bernoulli
  std::size_t arms = 5;
  double best_mean = 0.6;
  double rest_mean = 0.4;
  std::vector<double> arm_means;  // fixed instance; optimal index is the argmax
  std::vector<std::string> arm_labels;  // fixed labels instead of random letters
  // informative
  std::size_t informative_arms = 10;
  std::optional<std::size_t> optimal_arm;
  // riverswim
  std::size_t river_length = 3;
  // comblock / wordle
  std::optional<std::string> code;
  std::optional<std::string> target;
  std::string corpus_file;  // defaults to the bundled word list
  // customer
  std::string dataset_file;  // defaults to the bundled sample
  std::optional<std::size_t> scenario_index;
  PriorMode prior_mode = PriorMode::LlmGenerated;
};

struct AgentConfig {
  std::string id;  // random, thompson, vanilla_psrl, bayes_lock, llm_psrl, llm_ids, icrl, reflexion, icpi
  Temperatures temperatures;
  double keep_probability = 1.0;
  std::size_t grid_size = 1001;
  std::string prior;  // empty means the environment default
  PosteriorUpdateMode update_mode = PosteriorUpdateMode::WholeTrajectory;
  bool policy_cache = false;
  std::size_t rollout_horizon = 0;
  std::size_t rollouts_per_action = 1;
  std::optional<double> alpha0;
  IdsMode ids_mode = IdsMode::Bandit;
  std::optional<double> optimal_value;
  std::vector<std::pair<std::string, std::string>> template_overrides;  // id, body
};

struct BackendConfig {
  std::string kind = "scripted";  // scripted, oracle, openai
  std::vector<llm::ScriptRule> script;
  llm::ScriptedBackend::Options script_options;
  llm::OpenAiSettings openai;
  double requests_per_minute = 0.0;
  double tokens_per_minute = 0.0;
  llm::ModelSettings models;
  llm::RetryPolicy retry;
};

struct ExperimentConfig {
  std::string name;
  EnvironmentConfig environment;
  AgentConfig agent;
  EpisodeBudget budget;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t parallel = 1;
  BackendConfig backend;
  std::string output_dir;
  TokenPrices prices;
  std::string source_json;  // normalized snapshot of the input document

  bool uses_llm() const;
};

// Parses a JSON document. Relative paths resolve against base_dir. Throws
// ConfigError listing every problem, including unknown keys.
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = ".",
                              const std::string& default_name = "experiment");
ExperimentConfig load_config(const std::string& path);

// Budget and agent defaults for an environment: K and H, bandit sampling
// temperature 1.2, per-step updates for bandits, policy cache for RiverSwim.
EpisodeBudget default_budget(const EnvironmentConfig& env);

std::string bundled_data_path(const std::string& relative);

}  // namespace psrl::harness
