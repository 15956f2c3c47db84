#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "psrl/core/rng.hpp"
#include "psrl/llm/chat.hpp"
#include "psrl/llm/knowledge.hpp"

namespace psrl::llm {

enum class OracleEnv { Bernoulli, Informative, Lock, Wordle, Tabular };

struct OracleSpec {
  OracleEnv env = OracleEnv::Lock;
  std::vector<std::string> action_labels;  // bandits
  knowledge::TabularLabels tabular;        // tabular MDPs
  std::size_t horizon = 1;
  std::vector<std::string> corpus;  // Wordle candidate words
  std::string sampler_user_template;
  const TemplateRegistry* registry = nullptr;  // default_registry() when null
};

// Implements the posterior sampler, sample policy, posterior updater and the
// bandit IDS scalar roles exactly, reading and writing the knowledge formats.
// Token counts are synthetic: a quarter of the prompt and response lengths.
class OracleBackend : public ChatBackend {
 public:
  OracleBackend(OracleSpec spec, std::uint64_t seed);
  std::string name() const override { return "oracle"; }
  ChatResponse complete(const ChatRequest& request) override;

  std::string initial_knowledge() const;

 private:
  std::string sample(const std::string& knowledge);
  std::string act(const std::string& hypothesis, const std::string& state);
  std::string update(const std::string& prior, const std::vector<Experience>& steps) const;
  std::string ids_scalar(const std::string& role, const std::string& knowledge, const std::string& action) const;
  const TemplateRegistry& registry() const;
  const GuessVocabulary& vocab() const;
  std::string alphabet() const;
  std::size_t guess_length() const;

  OracleSpec spec_;
  Rng rng_;
  std::mutex mutex_;
};

}  // namespace psrl::llm
