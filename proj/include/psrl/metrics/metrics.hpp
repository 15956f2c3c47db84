#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace psrl {

struct RegretCurve {
  std::size_t trial_id = 0;
  std::vector<double> per_episode_regret;

  std::vector<double> cumulative() const;
};

struct AggregateCurve {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t num_trials = 0;
};

// Per-index mean and standard error (sample std with n - 1, over sqrt n).
// A single trial reports zero standard error.
AggregateCurve aggregate(const std::vector<std::vector<double>>& series);
AggregateCurve aggregate(const std::vector<RegretCurve>& curves);

// SF(t) = 1 iff `optimal` does not occur in choices[t..T].
std::vector<int> suffix_failure(const std::vector<std::size_t>& choices, std::size_t optimal);

// value(t) = |A| / t * (least count of any arm in choices[1..t]).
std::vector<double> min_action_frequency(const std::vector<std::size_t>& choices, std::size_t num_actions);

struct TokenCounts {
  std::uint64_t input = 0;
  std::uint64_t output = 0;

  std::uint64_t total() const { return input + output; }
  TokenCounts& operator+=(const TokenCounts& o) {
    input += o.input;
    output += o.output;
    return *this;
  }
};

class TokenLedger {
 public:
  void add(const std::string& role_tag, std::size_t episode, std::uint64_t input_tokens, std::uint64_t output_tokens);
  void merge(const TokenLedger& other);

  const std::map<std::pair<std::string, std::size_t>, TokenCounts>& entries() const { return entries_; }
  TokenCounts episode_total(std::size_t episode) const;
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::pair<std::string, std::size_t>, TokenCounts> entries_;
};

// Dollar prices per million tokens.
struct TokenPrices {
  double input_per_million = 2.5;
  double output_per_million = 10.0;
};

struct MeanTokens {
  double input = 0.0;
  double output = 0.0;
};

struct TokenSummary {
  // Mean tokens per episode for each role.
  std::map<std::string, MeanTokens> per_role_per_episode;
  std::map<std::size_t, TokenCounts> per_episode_total;
  TokenCounts total;
  double mean_tokens_per_episode = 0.0;
  double cost_dollars = 0.0;
};

// Averages are taken over `num_episodes` (use the run's K times trials);
// 0 means the number of distinct episodes seen in the ledger.
TokenSummary token_summary(const TokenLedger& ledger, const TokenPrices& prices, std::size_t num_episodes = 0);

// Per-episode token averages of LLM-PSRL with a GPT-4o-class model, used for
// live-run cost estimates. Time-sensitive reference values.
struct ReferenceTokenUse {
  std::string environment;
  double input_tokens_per_episode;
  double output_tokens_per_episode;
  double single_trial_dollars;
};
const std::vector<ReferenceTokenUse>& reference_token_use();

}  // namespace psrl
