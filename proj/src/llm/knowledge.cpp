#include "psrl/llm/knowledge.hpp"

#include <algorithm>
#include <regex>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "psrl/core/errors.hpp"

namespace psrl::llm::knowledge {
namespace {

std::string num(double x) { return fmt::format("{}", x); }

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("bad number '{}'", s));
  }
}

std::vector<double> number_list(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string item = s.substr(pos, comma - pos);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    out.push_back(to_double(item));
    pos = comma + 1;
  }
  return out;
}

std::string escape_regex(const std::string& s) {
  static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
  return std::regex_replace(s, special, R"(\$&)");
}

// Text from `key` up to the next occurrence of `stop` (or the end).
std::optional<std::string> section(const std::string& text, const std::string& key, const std::string& stop) {
  const std::size_t at = text.find(key);
  if (at == std::string::npos) return std::nullopt;
  const std::size_t begin = at + key.size();
  const std::size_t end = text.find(stop, begin);
  return text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
}

}  // namespace

std::string render_beta_knowledge(const std::vector<std::string>& labels, const BetaBelief& belief) {
  if (labels.size() != belief.arms()) throw Error("beta knowledge: one label per arm required");
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    parts.push_back(fmt::format("The mean reward of action {} follows Beta({}, {}).", labels[i], num(belief.alpha[i]),
                                num(belief.beta[i])));
  }
  return fmt::format("{}", fmt::join(parts, " "));
}

BetaBelief parse_beta_knowledge(const std::vector<std::string>& labels, const std::string& text) {
  BetaBelief b = BetaBelief::uniform(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::regex re("The mean reward of action " + escape_regex(labels[i]) +
                        R"( follows Beta\(([0-9.eE+-]+), ([0-9.eE+-]+)\)\.)");
    std::smatch m;
    if (!std::regex_search(text, m, re)) throw ParseError(fmt::format("no Beta belief for action {}", labels[i]));
    b.alpha[i] = to_double(m[1]);
    b.beta[i] = to_double(m[2]);
  }
  b.validate();
  return b;
}

std::string render_reward_hypothesis(const std::vector<std::string>& labels, const std::vector<double>& values) {
  if (labels.size() != values.size()) throw Error("reward hypothesis: one value per action required");
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < labels.size(); ++i) parts.push_back(fmt::format("action {}: {}", labels[i], num(values[i])));
  return fmt::format("You think the mean rewards are: {}.", fmt::join(parts, "; "));
}

std::vector<double> parse_reward_hypothesis(const std::vector<std::string>& labels, const std::string& text) {
  std::vector<double> out;
  for (const auto& l : labels) {
    const std::regex re("action " + escape_regex(l) + R"(: ([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))");
    std::smatch m;
    if (!std::regex_search(text, m, re)) throw ParseError(fmt::format("no reward hypothesis for action {}", l));
    out.push_back(to_double(m[1]));
  }
  return out;
}

std::string render_informative_knowledge(const std::vector<std::size_t>& candidates) {
  if (candidates.empty()) throw Error("informative knowledge needs at least one candidate");
  if (candidates.size() == 1) return fmt::format("The optimal action is {}.", candidates[0]);
  return fmt::format("The optimal action is equally likely to be any one of actions {}.", fmt::join(candidates, ", "));
}

std::vector<std::size_t> parse_informative_knowledge(const std::string& text) {
  static const std::regex many(R"(any one of actions ([0-9, ]+)\.)");
  static const std::regex one(R"(The optimal action is ([0-9]+)\.)");
  std::smatch m;
  std::vector<std::size_t> out;
  if (std::regex_search(text, m, many)) {
    for (double d : number_list(m[1])) out.push_back(static_cast<std::size_t>(d));
  } else if (std::regex_search(text, m, one)) {
    out.push_back(static_cast<std::size_t>(std::stoul(m[1])));
  } else {
    throw ParseError("no optimal-action knowledge found");
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string render_guess_knowledge(const GuessVocabulary& vocab, std::size_t length, const std::string& alphabet_text,
                                   const std::vector<GuessFact>& facts) {
  std::string plural = vocab.symbol_noun_plural;
  std::transform(plural.begin(), plural.end(), plural.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::string out = fmt::format(
      "The {} consists of {} distinct {} from {}, and every such {} that agrees with the known facts is equally "
      "likely. Known facts:",
      vocab.target_noun, length, plural, alphabet_text, vocab.target_noun);
  if (facts.empty()) return out + " none.";
  for (const auto& f : facts) {
    switch (f.feedback) {
      case Feedback::CorrectPosition:
        out += fmt::format(" {} {} is in position {}.", vocab.symbol_noun, f.symbol, f.position + 1);
        break;
      case Feedback::WrongPosition:
        out += fmt::format(" {} {} is in the {} but not in position {}.", vocab.symbol_noun, f.symbol,
                           vocab.target_noun, f.position + 1);
        break;
      case Feedback::Absent:
        out += fmt::format(" {} {} is not in the {}.", vocab.symbol_noun, f.symbol, vocab.target_noun);
        break;
    }
  }
  return out;
}

std::vector<GuessFact> parse_guess_knowledge(const GuessVocabulary& vocab, const std::string& text) {
  const std::size_t at = text.find("Known facts:");
  if (at == std::string::npos) throw ParseError("no 'Known facts:' section");
  const std::string body = text.substr(at);
  const std::string noun = escape_regex(vocab.symbol_noun);
  const std::string target = escape_regex(vocab.target_noun);
  const std::regex re(noun + R"( (\S) is (?:in position ([0-9]+)|in the )" + target +
                      R"( but not in position ([0-9]+)|not in the )" + target + R"()\.)");
  std::vector<GuessFact> facts;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), re); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    GuessFact f;
    f.symbol = m.str(1)[0];
    if (m[2].matched) {
      f.feedback = Feedback::CorrectPosition;
      f.position = std::stoul(m.str(2)) - 1;
    } else if (m[3].matched) {
      f.feedback = Feedback::WrongPosition;
      f.position = std::stoul(m.str(3)) - 1;
    } else {
      f.feedback = Feedback::Absent;
    }
    if (std::find(facts.begin(), facts.end(), f) == facts.end()) facts.push_back(f);
  }
  return facts;
}

bool consistent_with(const std::string& candidate, const std::vector<GuessFact>& facts) {
  for (const auto& f : facts) {
    const bool present = candidate.find(f.symbol) != std::string::npos;
    switch (f.feedback) {
      case Feedback::CorrectPosition:
        if (f.position >= candidate.size() || candidate[f.position] != f.symbol) return false;
        break;
      case Feedback::WrongPosition:
        if (!present || (f.position < candidate.size() && candidate[f.position] == f.symbol)) return false;
        break;
      case Feedback::Absent:
        if (present) return false;
        break;
    }
  }
  return true;
}

std::optional<GuessFact> fact_from_transition(const GuessVocabulary& vocab, const std::string& next_state) {
  const auto entries = parse_guess_state(vocab, next_state);
  if (entries.empty()) return std::nullopt;
  const Feedback fb = entries.back().feedback;
  return GuessFact{fb == Feedback::Absent ? 0 : entries.size() - 1, entries.back().symbol, fb};
}

std::string render_guess_hypothesis(const GuessVocabulary& vocab, const std::string& guess) {
  return fmt::format("You think the {} is {}.", vocab.target_noun, guess);
}

std::string parse_guess_hypothesis(const std::string& text, std::size_t length, const std::string& alphabet) {
  std::size_t from = text.rfind("You think");
  if (from == std::string::npos) from = 0;
  std::string best;
  std::string cur;
  auto flush = [&] {
    if (cur.size() == length) best = cur;
    cur.clear();
  };
  for (std::size_t i = from; i < text.size(); ++i) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    if (std::isalnum(static_cast<unsigned char>(text[i]))) {
      if (alphabet.find(c) == std::string::npos) {
        cur = std::string(length + 1, '#');  // poison the current word
      } else {
        cur += c;
      }
    } else {
      flush();
    }
  }
  flush();
  if (best.empty()) throw ParseError(fmt::format("no {}-symbol guess in '{}'", length, text));
  return best;
}

namespace {

std::string pair_prefix(const TabularLabels& l, std::size_t s, std::size_t a) {
  return fmt::format("From {} via {} {}: ", l.states[s], l.action_noun, l.actions[a]);
}

std::string hypothesis_prefix(const TabularLabels& l, std::size_t s, std::size_t a) {
  return fmt::format("From {} via {} {} you reach ", l.states[s], l.action_noun, l.actions[a]);
}

}  // namespace

std::string render_tabular_knowledge(const TabularLabels& labels, const DirichletBelief& trans, const RewardBelief& rew) {
  const std::size_t S = labels.states.size(), A = labels.actions.size();
  if (trans.num_states != S || trans.num_actions != A || rew.num_states != S || rew.num_actions != A) {
    throw Error("tabular knowledge: belief sizes disagree with labels");
  }
  std::vector<std::string> parts;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      std::vector<std::string> alphas;
      for (double x : trans.row(s, a)) alphas.push_back(num(x));
      std::string reward;
      if (const auto& obs = rew.observed[s * A + a]) {
        reward = fmt::format("the reward is {}", num(*obs));
      } else {
        std::vector<std::string> support;
        for (double x : rew.support) support.push_back(num(x));
        reward = fmt::format("the reward is unknown and uniformly one of {{{}}}", fmt::join(support, ", "));
      }
      parts.push_back(fmt::format("{}the next {} follows Dirichlet({}) over {}; {}.", pair_prefix(labels, s, a),
                                  labels.state_noun, fmt::join(alphas, ", "), fmt::join(labels.states, ", "), reward));
    }
  }
  return fmt::format("{}", fmt::join(parts, " "));
}

std::pair<DirichletBelief, RewardBelief> parse_tabular_knowledge(const TabularLabels& labels, const std::string& text) {
  const std::size_t S = labels.states.size(), A = labels.actions.size();
  DirichletBelief trans = DirichletBelief::uniform(S, A, 1.0);
  RewardBelief rew;
  bool have_support = false;
  static const std::regex dir(R"(Dirichlet\(([^)]*)\))");
  static const std::regex known(R"(the reward is ([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\.)");
  static const std::regex unknown(R"(uniformly one of \{([^}]*)\})");
  std::vector<std::optional<double>> observed(S * A);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const auto body = section(text, pair_prefix(labels, s, a), "From ");
      if (!body) throw ParseError(fmt::format("no knowledge for {} / {}", labels.states[s], labels.actions[a]));
      std::smatch m;
      if (!std::regex_search(*body, m, dir)) throw ParseError("missing Dirichlet parameters");
      const auto alphas = number_list(m[1]);
      if (alphas.size() != S) throw ParseError("Dirichlet parameter count differs from the number of states");
      for (std::size_t n = 0; n < S; ++n) trans.concentration[(s * A + a) * S + n] = alphas[n];
      if (std::regex_search(*body, m, known)) {
        observed[s * A + a] = to_double(m[1]);
      } else if (std::regex_search(*body, m, unknown)) {
        if (!have_support) {
          rew = RewardBelief::uniform(S, A, number_list(m[1]));
          have_support = true;
        }
      } else {
        throw ParseError("missing reward knowledge");
      }
    }
  }
  if (!have_support) rew = RewardBelief::uniform(S, A);
  for (std::size_t i = 0; i < S * A; ++i) {
    if (observed[i]) rew = reward_update(rew, i / A, i % A, *observed[i]);
  }
  trans.validate();
  return {trans, rew};
}

std::string render_tabular_hypothesis(const TabularLabels& labels, const TabularMdp& mdp) {
  const std::size_t S = labels.states.size(), A = labels.actions.size();
  std::vector<std::string> parts;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      std::vector<std::string> dests;
      for (std::size_t n = 0; n < S; ++n) dests.push_back(fmt::format("{} with probability {}", labels.states[n], num(mdp.p(s, a, n))));
      parts.push_back(fmt::format("{}{} and receive reward {}.", hypothesis_prefix(labels, s, a), fmt::join(dests, ", "),
                                  num(mdp.r(s, a))));
    }
  }
  return fmt::format("You think the map is as follows. {}", fmt::join(parts, " "));
}

TabularMdp parse_tabular_hypothesis(const TabularLabels& labels, const std::string& text, std::size_t horizon) {
  const std::size_t S = labels.states.size(), A = labels.actions.size();
  TabularMdp m = TabularMdp::zeros(S, A, horizon);
  static const std::regex reward(R"(receive reward ([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))");
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const auto body = section(text, hypothesis_prefix(labels, s, a), "From ");
      if (!body) throw ParseError(fmt::format("no hypothesis for {} / {}", labels.states[s], labels.actions[a]));
      double z = 0.0;
      for (std::size_t n = 0; n < S; ++n) {
        const std::regex re(escape_regex(labels.states[n]) + R"( with probability ([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))");
        std::smatch mm;
        if (std::regex_search(*body, mm, re)) z += (m.p(s, a, n) = to_double(mm[1]));
      }
      if (!(z > 0)) throw ParseError("transition probabilities missing");
      for (std::size_t n = 0; n < S; ++n) m.p(s, a, n) /= z;
      std::smatch rm;
      if (!std::regex_search(*body, rm, reward)) throw ParseError("reward missing");
      m.r(s, a) = std::clamp(to_double(rm[1]), 0.0, 1.0);
    }
  }
  m.initial_dist.assign(S, 0.0);
  m.initial_dist[0] = 1.0;
  return m;
}

}  // namespace psrl::llm::knowledge
