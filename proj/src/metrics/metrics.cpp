#include "psrl/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "psrl/core/errors.hpp"

namespace psrl {

std::vector<double> RegretCurve::cumulative() const {
  std::vector<double> out(per_episode_regret.size());
  double run = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = run += per_episode_regret[i];
  return out;
}

AggregateCurve aggregate(const std::vector<std::vector<double>>& series) {
  if (series.empty()) throw Error("aggregate: no curves");
  const std::size_t len = series.front().size();
  for (const auto& s : series) {
    if (s.size() != len) throw Error("aggregate: curves differ in length");
  }
  const std::size_t n = series.size();
  AggregateCurve out{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0), n};
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& s : series) sum += s[i];
    const double mean = sum / static_cast<double>(n);
    out.mean[i] = mean;
    if (n > 1) {
      double ss = 0.0;
      for (const auto& s : series) ss += (s[i] - mean) * (s[i] - mean);
      out.std_error[i] = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
  }
  return out;
}

AggregateCurve aggregate(const std::vector<RegretCurve>& curves) {
  std::vector<std::vector<double>> series;
  series.reserve(curves.size());
  for (const auto& c : curves) series.push_back(c.per_episode_regret);
  return aggregate(series);
}

std::vector<int> suffix_failure(const std::vector<std::size_t>& choices, std::size_t optimal) {
  std::vector<int> sf(choices.size(), 0);
  int run = 1;
  for (std::size_t t = choices.size(); t-- > 0;) {
    run = run && choices[t] != optimal;
    sf[t] = run;
  }
  return sf;
}

std::vector<double> min_action_frequency(const std::vector<std::size_t>& choices, std::size_t num_actions) {
  if (num_actions < 1) throw Error("min_action_frequency: need at least one action");
  std::vector<std::size_t> counts(num_actions, 0);
  std::vector<double> out(choices.size());
  for (std::size_t t = 0; t < choices.size(); ++t) {
    if (choices[t] >= num_actions) throw Error("min_action_frequency: choice out of range");
    ++counts[choices[t]];
    const double least = static_cast<double>(*std::min_element(counts.begin(), counts.end()));
    out[t] = static_cast<double>(num_actions) * least / static_cast<double>(t + 1);
  }
  return out;
}

void TokenLedger::add(const std::string& role_tag, std::size_t episode, std::uint64_t input_tokens,
                      std::uint64_t output_tokens) {
  entries_[{role_tag, episode}] += TokenCounts{input_tokens, output_tokens};
}

void TokenLedger::merge(const TokenLedger& other) {
  for (const auto& [key, counts] : other.entries_) entries_[key] += counts;
}

TokenCounts TokenLedger::episode_total(std::size_t episode) const {
  TokenCounts total;
  for (const auto& [key, counts] : entries_) {
    if (key.second == episode) total += counts;
  }
  return total;
}

TokenSummary token_summary(const TokenLedger& ledger, const TokenPrices& prices, std::size_t num_episodes) {
  TokenSummary out;
  std::set<std::size_t> episodes;
  std::map<std::string, TokenCounts> per_role;
  for (const auto& [key, counts] : ledger.entries()) {
    episodes.insert(key.second);
    per_role[key.first] += counts;
    out.per_episode_total[key.second] += counts;
    out.total += counts;
  }
  const std::size_t denom = num_episodes ? num_episodes : episodes.size();
  if (denom > 0) {
    for (const auto& [role, counts] : per_role) {
      out.per_role_per_episode[role] = {static_cast<double>(counts.input) / static_cast<double>(denom),
                                        static_cast<double>(counts.output) / static_cast<double>(denom)};
    }
    out.mean_tokens_per_episode = static_cast<double>(out.total.total()) / static_cast<double>(denom);
  }
  out.cost_dollars = static_cast<double>(out.total.input) * prices.input_per_million / 1e6 +
                     static_cast<double>(out.total.output) * prices.output_per_million / 1e6;
  return out;
}

const std::vector<ReferenceTokenUse>& reference_token_use() {
  static const std::vector<ReferenceTokenUse> table = {
      {"bernoulli", 1500, 800, 1.00},
      {"comblock", 4000, 1100, 0.11},
      {"wordle", 3700, 850, 0.11},
      {"riverswim", 4700, 1500, 0.90},
  };
  return table;
}

}  // namespace psrl
