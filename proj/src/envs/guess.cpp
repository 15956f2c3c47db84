#include "psrl/envs/guess.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "psrl/core/errors.hpp"
#include "psrl/llm/template.hpp"

namespace psrl {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string feedback_sentence(const GuessVocabulary& vocab, const GuessEntry& e) {
  switch (e.feedback) {
    case Feedback::CorrectPosition:
      return fmt::format("{} {} is in the correct position.", vocab.symbol_noun, e.symbol);
    case Feedback::WrongPosition:
      return fmt::format("{} {} is in the {} but in the wrong position.", vocab.symbol_noun, e.symbol,
                         vocab.target_noun);
    case Feedback::Absent:
      break;
  }
  return fmt::format("{} {} does not appear in the {}.", vocab.symbol_noun, e.symbol, vocab.target_noun);
}

bool distinct_chars(const std::string& s) {
  std::string sorted = s;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

std::vector<std::string> char_range(char first, char last) {
  std::vector<std::string> out;
  for (char c = first; c <= last; ++c) out.emplace_back(1, c);
  return out;
}

char single_symbol(const std::string& action, const std::vector<std::string>& alphabet, const char* what) {
  if (std::find(alphabet.begin(), alphabet.end(), action) == alphabet.end()) {
    throw RejectedAction(action, fmt::format("'{}' is not a valid {}", action, what));
  }
  return action[0];
}

}  // namespace

Feedback classify(const std::string& target, std::size_t position, char symbol) {
  if (position >= target.size()) throw Error(fmt::format("position {} outside the target", position + 1));
  if (target[position] == symbol) return Feedback::CorrectPosition;
  return target.find(symbol) != std::string::npos ? Feedback::WrongPosition : Feedback::Absent;
}

const GuessVocabulary& lock_vocabulary() {
  static const GuessVocabulary v{"Digit", "Digits", "code"};
  return v;
}

const GuessVocabulary& wordle_vocabulary() {
  static const GuessVocabulary v{"Letter", "Letters", "target word"};
  return v;
}

std::string render_guess_state(const GuessVocabulary& vocab, const std::vector<GuessEntry>& entries) {
  if (entries.empty()) return fmt::format("No {} entered yet.", lower(vocab.symbol_noun_plural));
  std::string out = vocab.symbol_noun_plural + " entered so far: ";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ", ";
    out += entries[i].symbol;
  }
  out += ".";
  for (const auto& e : entries) out += " " + feedback_sentence(vocab, e);
  return out;
}

std::vector<GuessEntry> parse_guess_state(const GuessVocabulary& vocab, const std::string& state) {
  if (state == render_guess_state(vocab, {})) return {};
  const std::string head = vocab.symbol_noun_plural + " entered so far: ";
  if (state.rfind(head, 0) != 0) throw ParseError(fmt::format("unrecognised state '{}'", state));
  const std::size_t stop = state.find('.', head.size());
  if (stop == std::string::npos) throw ParseError(fmt::format("unrecognised state '{}'", state));
  std::vector<GuessEntry> entries;
  const std::string list = state.substr(head.size(), stop - head.size());
  for (std::size_t i = 0; i < list.size(); i += 3) {
    entries.push_back({list[i], Feedback::Absent});
    if (i + 1 < list.size() && list.compare(i + 1, 2, ", ") != 0) {
      throw ParseError(fmt::format("unrecognised symbol list in '{}'", state));
    }
  }
  std::size_t pos = stop + 1;
  for (auto& e : entries) {
    bool matched = false;
    for (Feedback f : {Feedback::CorrectPosition, Feedback::WrongPosition, Feedback::Absent}) {
      const std::string sentence = " " + feedback_sentence(vocab, {e.symbol, f});
      if (state.compare(pos, sentence.size(), sentence) == 0) {
        e.feedback = f;
        pos += sentence.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(fmt::format("missing feedback for '{}' in '{}'", e.symbol, state));
  }
  if (pos != state.size()) throw ParseError(fmt::format("trailing text in state '{}'", state));
  return entries;
}

GuessingGame::GuessingGame(std::string target, std::vector<std::string> alphabet, GuessVocabulary vocab)
    : target_(std::move(target)), alphabet_(std::move(alphabet)), vocab_(std::move(vocab)) {
  current_state_ = render_guess_state(vocab_, {});
}

std::string GuessingGame::reset(Rng&) {
  entries_.clear();
  current_state_ = render_guess_state(vocab_, entries_);
  return current_state_;
}

StepOutcome GuessingGame::step(const std::string& state, const std::string& action, Rng&) {
  if (state != current_state_) throw Error(fmt::format("{}: stale state '{}'", id(), state));
  if (entries_.size() >= target_.size()) throw Error(fmt::format("{}: episode already complete", id()));
  const char symbol = single_symbol(action, alphabet_, lower(vocab_.symbol_noun).c_str());
  entries_.push_back({symbol, classify(target_, entries_.size(), symbol)});
  current_state_ = render_guess_state(vocab_, entries_);
  const bool done = entries_.size() == target_.size();
  double reward = 0.0;
  if (done) {
    reward = std::all_of(entries_.begin(), entries_.end(),
                         [](const GuessEntry& e) { return e.feedback == Feedback::CorrectPosition; })
                 ? 1.0
                 : 0.0;
  }
  return {reward, current_state_, done};
}

bool GuessingGame::solved(const Trajectory& trajectory) const { return trajectory.total_reward() >= 1.0; }

void CombLockSpec::validate() const {
  if (code.size() != 3 || !std::all_of(code.begin(), code.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      !distinct_chars(code)) {
    throw Error(fmt::format("combination lock code '{}' must be three distinct digits", code));
  }
}

CombLockSpec CombLockSpec::random(Rng& rng) {
  const auto& codes = all_lock_codes();
  return {codes[uniform_index(rng, codes.size())]};
}

const std::vector<std::string>& all_lock_codes() {
  static const std::vector<std::string> codes = [] {
    std::vector<std::string> out;
    for (char a = '0'; a <= '9'; ++a)
      for (char b = '0'; b <= '9'; ++b)
        for (char c = '0'; c <= '9'; ++c)
          if (a != b && a != c && b != c) out.push_back({a, b, c});
    return out;
  }();
  return codes;
}

Feedback comblock_feedback(const CombLockSpec& spec, std::size_t position, const std::string& digit) {
  static const auto digits = char_range('0', '9');
  const char d = single_symbol(digit, digits, "digit");
  if (position < 1 || position > 3) throw Error(fmt::format("lock position {} outside [1, 3]", position));
  return classify(spec.code, position - 1, d);
}

CombinationLock::CombinationLock(CombLockSpec spec)
    : GuessingGame((spec.validate(), spec.code), char_range('0', '9'), lock_vocabulary()) {}

std::string CombinationLock::describe() const { return llm::default_registry().render("comblock.description", {}); }

void WordleSpec::validate() const {
  if (target.size() != 5 || !std::all_of(target.begin(), target.end(), [](char c) { return c >= 'a' && c <= 'z'; }) ||
      !distinct_chars(target)) {
    throw Error(fmt::format("Wordle target '{}' must be five distinct lowercase letters", target));
  }
}

std::vector<std::string> parse_wordle_corpus(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      WordleSpec{line}.validate();
    } catch (const Error& e) {
      throw ParseError(fmt::format("corpus line {}: {}", lineno, e.what()));
    }
    words.push_back(line);
  }
  if (words.empty()) throw ParseError("Wordle corpus is empty");
  return words;
}

std::vector<std::string> load_wordle_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open Wordle corpus '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_wordle_corpus(buf.str());
}

Feedback wordle_feedback(const WordleSpec& spec, std::size_t position, const std::string& letter) {
  static const auto letters = char_range('a', 'z');
  const char l = single_symbol(letter, letters, "letter");
  if (position < 1 || position > 5) throw Error(fmt::format("Wordle position {} outside [1, 5]", position));
  return classify(spec.target, position - 1, l);
}

Wordle::Wordle(WordleSpec spec) : GuessingGame((spec.validate(), spec.target), char_range('a', 'z'), wordle_vocabulary()) {}

std::string Wordle::describe() const { return llm::default_registry().render("wordle.description", {}); }

}  // namespace psrl
