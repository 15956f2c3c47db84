#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "psrl/envs/guess.hpp"

namespace psrl {

// Codes of `length` pairwise-distinct symbols drawn from the first
// `alphabet_size` digits.
struct LockGame {
  std::size_t length = 3;
  std::size_t alphabet_size = 10;

  std::vector<std::string> all_codes() const;
};

// The set of codes consistent with all feedback received so far.
struct LockBelief {
  std::vector<std::string> consistent_codes;

  static LockBelief uniform(const LockGame& game);
  // Keeps codes that would have produced `feedback` for `digit` at 0-based
  // `position`.
  void refine(std::size_t position, char digit, Feedback feedback);
  bool empty() const { return consistent_codes.empty(); }
};

struct LockDecision {
  char digit = '0';
  // Expected number of solved episodes from here on, as a count over the
  // consistent codes: value = successes / |consistent_codes|.
  std::uint64_t successes = 0;
  std::size_t belief_size = 0;

  double value() const { return belief_size ? static_cast<double>(successes) / static_cast<double>(belief_size) : 0.0; }
};

// Memoized Bayes-optimal expectimax for the combination lock under a uniform
// prior over consistent codes. Feedback refines the belief after every digit.
// Pruning is lossless: never-entered digits are interchangeable, digits absent
// from every consistent code are weakly dominated, and branches whose
// success bound cannot beat the incumbent are skipped. Among equally good
// digits the planner prefers one that some consistent code has at the
// current position, then the lower digit.
class LockPlanner {
 public:
  static constexpr std::size_t kDefaultNodeBudget = 5'000'000;

  explicit LockPlanner(LockGame game = {}, std::size_t node_budget = kDefaultNodeBudget);

  // `prefix` holds the digits already entered this episode; episodes_left
  // counts the current episode. Throws BudgetExceeded once more than
  // node_budget distinct nodes have been expanded.
  LockDecision decide(const LockBelief& belief, const std::string& prefix, std::size_t episodes_left);

  std::size_t nodes_expanded() const { return memo_.size(); }
  void clear() { memo_.clear(); }
  const LockGame& game() const { return game_; }

 private:
  static constexpr std::size_t kWords = 12;
  using Bits = std::array<std::uint64_t, kWords>;

  struct Key {
    Bits bits;
    std::uint8_t position;
    std::uint8_t episodes_left;
    bool alive;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  struct Entry {
    std::uint64_t successes;
    char digit;
  };

  Bits to_bits(const LockBelief& belief) const;
  std::uint64_t upper_bound(std::size_t count, std::size_t position, std::size_t episodes_left, bool alive) const;
  Entry solve(const Bits& b, std::size_t position, std::size_t episodes_left, bool alive, std::uint32_t entered_mask);

  LockGame game_;
  std::size_t node_budget_;
  std::vector<std::string> codes_;
  std::unordered_map<std::string, std::size_t> index_;
  // masks_[(position * alphabet + digit) * 3 + feedback]
  std::vector<Bits> masks_;
  std::vector<Bits> present_;  // codes containing digit anywhere
  std::unordered_map<Key, Entry, KeyHash> memo_;
};

// Convenience wrapper: the Bayes-optimal digit for 1-based `position`.
// digits_left_in_episode must equal length - position + 1.
char lock_bayes_optimal_action(LockPlanner& planner, const LockBelief& belief, const std::string& prefix,
                               std::size_t position, std::size_t episodes_left, std::size_t digits_left_in_episode);

}  // namespace psrl
