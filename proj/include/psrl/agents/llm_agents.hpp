#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "psrl/agents/classical.hpp"
#include "psrl/core/types.hpp"
#include "psrl/envs/customer.hpp"
#include "psrl/ids/ids.hpp"
#include "psrl/llm/chat.hpp"
#include "psrl/llm/parse.hpp"

namespace psrl {

struct TextPosterior {
  std::string text;
  std::size_t version = 0;  // updates folded in so far
};

// State -> action map for one episode.
class PolicyCache {
 public:
  std::optional<std::string> lookup(const std::string& state) const;
  void store(const std::string& state, const std::string& action) { map_[state] = action; }
  void clear() { map_.clear(); }
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<std::string, std::string> map_;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(double keep_probability = 1.0);
  void add(std::string rendered_episode) { episodes_.push_back(std::move(rendered_episode)); }
  // Each episode kept independently with probability p, in order.
  std::vector<std::size_t> sample(Rng& rng) const;
  const std::vector<std::string>& episodes() const { return episodes_; }
  double keep_probability() const { return p_; }

 private:
  std::vector<std::string> episodes_;
  double p_;
};

struct ReflectionLog {
  std::vector<std::string> reflections;
  // "Reflection 1: ...", one per line, in order.
  std::string render() const;
};

// Call and fallback counters. `calls` counts first attempts per role;
// re-prompts after an unparseable response are counted separately.
struct LlmAgentStats {
  std::map<std::string, std::size_t> calls;
  std::size_t reprompts = 0;
  std::size_t fallbacks = 0;
  std::size_t cache_hits = 0;
  std::size_t missing_sample_marker = 0;
  std::vector<std::string> warnings;
};

struct EpisodeCallCounts {
  std::size_t episode = 0;
  std::map<std::string, std::size_t> calls;
  std::size_t steps = 0;
  std::size_t novel_states = 0;

  std::size_t of(const std::string& role) const;
};

// Everything an LLM agent needs from its trial.
struct LlmAgentContext {
  llm::LlmClient* client = nullptr;
  const llm::TemplateRegistry* registry = nullptr;  // default_registry() when null
  std::string environment_description;
  ActionSetFn legal_actions;
  // Reuse the first action chosen in each state for the rest of the episode.
  bool policy_cache = false;
};

class LlmAgentBase : public Agent {
 public:
  LlmAgentBase(LlmAgentContext context, Rng rng);
  void begin_episode(std::size_t episode_index) override;

  const LlmAgentStats& stats() const { return stats_; }
  const std::vector<EpisodeCallCounts>& episode_calls() const { return episode_calls_; }

 protected:
  const llm::TemplateRegistry& registry() const;
  llm::Prompt prompt(const std::string& id, llm::Bindings bindings) const;
  llm::Prompt described(const std::string& id) const;
  std::string call(const std::string& role, llm::Prompt system, llm::Prompt user, double temperature);
  // Re-prompts once on an unparseable reply, then falls back to a uniformly
  // random legal action.
  std::string call_for_action(const std::string& role, const llm::Prompt& system, const llm::Prompt& user,
                              double temperature, const std::vector<std::string>& legal);
  // Re-prompts once, then lets UnparseableScalar abort the trial.
  double call_for_scalar(const std::string& role, const llm::Prompt& system, const llm::Prompt& user, double temperature,
                         const std::string& marker, llm::ScalarOptions options);
  double call_for_number(const std::string& role, const llm::Prompt& system, const llm::Prompt& user,
                         double temperature);
  // Cache hit for `state`, counting novel states and hits.
  std::optional<std::string> cached(const std::string& state);
  void remember(const std::string& state, const std::string& action);
  void at(std::size_t timestep);
  void warn(std::string message);
  EpisodeCallCounts& current() { return episode_calls_.back(); }

  LlmAgentContext ctx_;
  Rng rng_;
  LlmAgentStats stats_;
  std::vector<EpisodeCallCounts> episode_calls_;
  std::size_t episode_ = 0;
  PolicyCache cache_;
};

enum class PosteriorUpdateMode { WholeTrajectory, PerStep };

struct LlmPsrlConfig {
  std::string sampler_system_template;  // e.g. "comblock.sampler.system"
  std::string sampler_user_template;
  std::string initial_prior;
  Temperatures temperatures;
  PosteriorUpdateMode update_mode = PosteriorUpdateMode::WholeTrajectory;
};

// PSRL with three language-model roles: posterior sampling at episode start,
// a policy that follows the pinned hypothesis, and a posterior update at
// episode end.
class LlmPsrlAgent : public LlmAgentBase {
 public:
  LlmPsrlAgent(LlmAgentContext context, LlmPsrlConfig config, Rng rng);
  std::string name() const override { return "llm_psrl"; }
  void begin_episode(std::size_t episode_index) override;
  std::string select_action(const std::string& state, std::size_t timestep) override;
  void end_episode(const Trajectory& trajectory) override;

  const TextPosterior& posterior() const { return posterior_; }
  const std::string& hypothesis() const { return hypothesis_; }
  // Every hypothesis pinned so far, one per episode.
  const std::vector<std::string>& hypotheses() const { return hypotheses_; }

 private:
  LlmPsrlConfig config_;
  TextPosterior posterior_;
  std::string hypothesis_;
  std::vector<std::string> hypotheses_;
};

// Nullopt when the episode's calls match the LLM-PSRL contract, otherwise a
// description of the violation.
std::optional<std::string> check_llm_psrl_calls(const EpisodeCallCounts& counts, PosteriorUpdateMode mode,
                                                bool policy_cache);

enum class IdsMode { Bandit, Mdp };

struct LlmIdsConfig {
  IdsMode mode = IdsMode::Bandit;
  std::string initial_prior;
  Temperatures temperatures;  // policy temperature for scalar roles
  std::size_t grid_size = 1001;
  double optimal_value = 1.0;  // known V* for the value-based regret
};

struct IdsDecisionRecord {
  InfoRatioInputs inputs;
  IdsDistribution distribution;
  std::string action;
};

// Information-directed sampling with per-action regret (or action-value) and
// information-gain estimates from language-model calls.
class LlmIdsAgent : public LlmAgentBase {
 public:
  LlmIdsAgent(LlmAgentContext context, LlmIdsConfig config, Rng rng);
  std::string name() const override { return "llm_ids"; }
  std::string select_action(const std::string& state, std::size_t timestep) override;
  void observe_step(const Experience& step) override;
  void end_episode(const Trajectory&) override {}

  const TextPosterior& posterior() const { return posterior_; }
  const std::vector<IdsDecisionRecord>& decisions() const { return decisions_; }

 private:
  LlmIdsConfig config_;
  TextPosterior posterior_;
  std::vector<IdsDecisionRecord> decisions_;
  std::size_t timestep_ = 0;
};

struct IcrlConfig {
  double keep_probability = 1.0;
  double temperature = 1.0;
};

// In-context RL: the policy sees a Bernoulli(p) subsample of past episodes
// plus the current episode so far.
class IcrlAgent : public LlmAgentBase {
 public:
  IcrlAgent(LlmAgentContext context, IcrlConfig config, Rng rng);
  std::string name() const override { return "icrl"; }
  void begin_episode(std::size_t episode_index) override;
  std::string select_action(const std::string& state, std::size_t timestep) override;
  void observe_step(const Experience& step) override { partial_.push_back(step); }
  void end_episode(const Trajectory& trajectory) override;

  const ReplayBuffer& buffer() const { return buffer_; }
  const std::vector<std::size_t>& last_included() const { return last_included_; }

 private:
  IcrlConfig config_;
  ReplayBuffer buffer_;
  std::vector<Experience> partial_;
  std::vector<std::size_t> last_included_;
};

struct ReflexionConfig {
  double temperature = 1.0;
  double reflector_temperature = 1.0;
  // Guidance longer than this many characters raises a warning once.
  std::size_t guidance_warning_chars = 200'000;
};

class ReflexionAgent : public LlmAgentBase {
 public:
  ReflexionAgent(LlmAgentContext context, ReflexionConfig config, Rng rng);
  std::string name() const override { return "reflexion"; }
  std::string select_action(const std::string& state, std::size_t timestep) override;
  void end_episode(const Trajectory& trajectory) override;
  const ReflectionLog& log() const { return log_; }

 private:
  ReflexionConfig config_;
  ReflectionLog log_;
  bool warned_ = false;
};

struct IcpiConfig {
  std::size_t horizon = 1;          // episode horizon H
  std::size_t rollout_horizon = 0;  // 0 means the remaining horizon
  std::size_t rollouts_per_action = 1;
  double temperature = 1.0;
};

// In-context policy iteration: Q estimated per action by rolling out the
// language-model world model and rollout policy; greedy with random ties.
class IcpiAgent : public LlmAgentBase {
 public:
  IcpiAgent(LlmAgentContext context, IcpiConfig config, Rng rng);
  std::string name() const override { return "icpi"; }
  std::string select_action(const std::string& state, std::size_t timestep) override;
  void observe_step(const Experience& step) override { data_.push_back(step); }
  void end_episode(const Trajectory&) override {}

  const std::vector<double>& last_q() const { return last_q_; }

 private:
  double rollout(const std::string& state, const std::string& action, std::size_t length);

  IcpiConfig config_;
  std::vector<Experience> data_;
  std::vector<double> last_q_;
};

// Broad customer-service prior followed by the generated, scenario-specific
// supplement. The well-specified mode also tells the generator about the
// true solution.
std::string build_customer_prior(llm::LlmClient& client, const llm::TemplateRegistry& registry,
                                 const CustomerServiceSpec& spec, double temperature);

}  // namespace psrl
