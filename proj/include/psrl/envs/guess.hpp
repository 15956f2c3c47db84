#pragma once

#include <string>
#include <vector>

#include "psrl/core/environment.hpp"

namespace psrl {

enum class Feedback { CorrectPosition, WrongPosition, Absent };

// Classification of `symbol` entered at 0-based `position` against `target`.
Feedback classify(const std::string& target, std::size_t position, char symbol);

// Wording used by one guessing game ("Digit"/"code", "Letter"/"target word").
struct GuessVocabulary {
  std::string symbol_noun;
  std::string symbol_noun_plural;
  std::string target_noun;
};

const GuessVocabulary& lock_vocabulary();
const GuessVocabulary& wordle_vocabulary();

struct GuessEntry {
  char symbol = 0;
  Feedback feedback = Feedback::Absent;

  bool operator==(const GuessEntry&) const = default;
};

// State text for the symbols entered so far in the current episode, e.g.
// "Digits entered so far: 3, 4. Digit 3 is in the correct position. Digit 4
// is in the code but in the wrong position."
std::string render_guess_state(const GuessVocabulary& vocab, const std::vector<GuessEntry>& entries);
// Inverse of render_guess_state. Throws ParseError on malformed text.
std::vector<GuessEntry> parse_guess_state(const GuessVocabulary& vocab, const std::string& state);

// Shared mechanics of the combination lock and the letter-by-letter Wordle
// variant: H symbol entries per episode, per-symbol feedback, reward 1 on the
// final entry iff the whole guess equals the target.
class GuessingGame : public Environment {
 public:
  GuessingGame(std::string target, std::vector<std::string> alphabet, GuessVocabulary vocab);

  std::string reset(Rng& rng) override;
  StepOutcome step(const std::string& state, const std::string& action, Rng& rng) override;
  std::vector<std::string> action_set(const std::string&) const override { return alphabet_; }
  double informed_optimal_value() const override { return 1.0; }
  bool solved(const Trajectory& trajectory) const override;

  const std::string& target() const { return target_; }
  const GuessVocabulary& vocabulary() const { return vocab_; }
  std::size_t length() const { return target_.size(); }

 private:
  std::string target_;
  std::vector<std::string> alphabet_;
  GuessVocabulary vocab_;
  std::vector<GuessEntry> entries_;
  std::string current_state_;
};

struct CombLockSpec {
  std::string code;  // three distinct digits

  void validate() const;
  static CombLockSpec random(Rng& rng);
};

// All 720 codes in lexicographic order.
const std::vector<std::string>& all_lock_codes();

// position is 1-based; throws RejectedAction for a non-digit.
Feedback comblock_feedback(const CombLockSpec& spec, std::size_t position, const std::string& digit);

class CombinationLock : public GuessingGame {
 public:
  explicit CombinationLock(CombLockSpec spec);
  std::string id() const override { return "comblock"; }
  std::string describe() const override;
};

struct WordleSpec {
  std::string target;  // five distinct lowercase letters

  void validate() const;
};

// Newline-delimited lowercase words. Throws ParseError naming the line of any
// word that is not five distinct letters a-z. Empty lines are skipped.
std::vector<std::string> load_wordle_corpus(const std::string& path);
std::vector<std::string> parse_wordle_corpus(const std::string& text);

Feedback wordle_feedback(const WordleSpec& spec, std::size_t position, const std::string& letter);

class Wordle : public GuessingGame {
 public:
  explicit Wordle(WordleSpec spec);
  std::string id() const override { return "wordle"; }
  std::string describe() const override;
};

}  // namespace psrl
