#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psrl/bayes/beliefs.hpp"
#include "psrl/core/mdp.hpp"
#include "psrl/envs/guess.hpp"

// Canonical natural-language renderings of epistemic states and posterior
// samples. Initial priors are written in these forms, and the cheating-oracle
// backend reads and writes them, so every render has a matching parse.
namespace psrl::llm::knowledge {

// "The mean reward of action Q follows Beta(1, 1)." per arm.
std::string render_beta_knowledge(const std::vector<std::string>& labels, const BetaBelief& belief);
// Throws ParseError unless every label has exactly one Beta sentence.
BetaBelief parse_beta_knowledge(const std::vector<std::string>& labels, const std::string& text);

// "You think the mean rewards are: action Q: 0.53; action W: 0.41."
std::string render_reward_hypothesis(const std::vector<std::string>& labels, const std::vector<double>& values);
std::vector<double> parse_reward_hypothesis(const std::vector<std::string>& labels, const std::string& text);

// Candidate optimal arms of the informative-action bandit, ascending.
std::string render_informative_knowledge(const std::vector<std::size_t>& candidates);
std::vector<std::size_t> parse_informative_knowledge(const std::string& text);

// One fact learned from feedback: symbol at 0-based position. Absent facts
// carry position 0.
struct GuessFact {
  std::size_t position = 0;
  char symbol = 0;
  Feedback feedback = Feedback::Absent;
  bool operator==(const GuessFact&) const = default;
};

std::string render_guess_knowledge(const GuessVocabulary& vocab, std::size_t length, const std::string& alphabet_text,
                                   const std::vector<GuessFact>& facts);
std::vector<GuessFact> parse_guess_knowledge(const GuessVocabulary& vocab, const std::string& text);
bool consistent_with(const std::string& candidate, const std::vector<GuessFact>& facts);
// Facts revealed by the last entry of `next_state` (a guess state string).
std::optional<GuessFact> fact_from_transition(const GuessVocabulary& vocab, const std::string& next_state);

// "You think the code is 345." / "You think the target word is crane."
std::string render_guess_hypothesis(const GuessVocabulary& vocab, const std::string& guess);
// The last word of `length` symbols drawn from `alphabet` after "You think".
std::string parse_guess_hypothesis(const std::string& text, std::size_t length, const std::string& alphabet);

// Tabular knowledge: one Dirichlet and one reward belief per (state, action).
struct TabularLabels {
  std::vector<std::string> states;   // e.g. "Cave 1"
  std::vector<std::string> actions;  // e.g. "A"
  std::string state_noun = "cave";   // lower-case noun used inside sentences
  std::string action_noun = "tunnel";
};

std::string render_tabular_knowledge(const TabularLabels& labels, const DirichletBelief& trans, const RewardBelief& rew);
std::pair<DirichletBelief, RewardBelief> parse_tabular_knowledge(const TabularLabels& labels, const std::string& text);

std::string render_tabular_hypothesis(const TabularLabels& labels, const TabularMdp& mdp);
// Transition rows are renormalized; initial_dist puts mass on state 0.
TabularMdp parse_tabular_hypothesis(const TabularLabels& labels, const std::string& text, std::size_t horizon);

}  // namespace psrl::llm::knowledge
