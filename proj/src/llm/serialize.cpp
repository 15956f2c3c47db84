#include "psrl/llm/serialize.hpp"

#include <fmt/format.h>

#include "psrl/core/errors.hpp"

namespace psrl::llm {
namespace {

constexpr std::string_view kOpenTag = "<EXPERIENCE>";
constexpr std::string_view kCloseTag = "</EXPERIENCE>";

std::string block(const std::string& inner) { return fmt::format("{}\n{}{}", kOpenTag, inner, kCloseTag); }

std::string take_line(const std::string& text, std::size_t& pos, std::string_view key) {
  if (text.compare(pos, key.size(), key) != 0) {
    throw ParseError(fmt::format("expected '{}' at offset {}", key, pos));
  }
  pos += key.size();
  const std::size_t nl = text.find('\n', pos);
  if (nl == std::string::npos) throw ParseError("unterminated experience line");
  std::string value = text.substr(pos, nl - pos);
  pos = nl + 1;
  return value;
}

}  // namespace

std::string format_reward(double reward) { return fmt::format("{}", reward); }

std::string render_experience(const Experience& e) {
  return block(fmt::format("State: {}\nAction: {}\nReward: {}\nNext state: {}\n", e.state, e.action,
                           format_reward(e.reward), e.next_state));
}

std::string render_experiences(const std::vector<Experience>& steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += '\n';
    out += render_experience(steps[i]);
  }
  return out;
}

std::string render_trajectory(const Trajectory& t) { return render_experiences(t.steps); }

std::string render_transition_example(const Experience& e) {
  return block(fmt::format("State: {}\nAction: {}\nNext state: {}\n", e.state, e.action, e.next_state));
}

std::string render_reward_example(const Experience& e) {
  return block(fmt::format("State: {}\nAction: {}\nReward: {}\n", e.state, e.action, format_reward(e.reward)));
}

std::string render_policy_example(const Experience& e) {
  return block(fmt::format("State: {}\nAction: {}\n", e.state, e.action));
}

std::size_t count_experience_blocks(const std::string& text) {
  std::size_t n = 0;
  // Only complete blocks count; prose that merely names the tags does not.
  const std::string head = std::string(kOpenTag) + "\nState: ";
  for (std::size_t pos = text.find(head); pos != std::string::npos; pos = text.find(head, pos + 1)) {
    if (text.find(kCloseTag, pos) != std::string::npos) ++n;
  }
  return n;
}

std::vector<Experience> parse_experiences(const std::string& text) {
  std::vector<Experience> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (!out.empty()) {
      if (text[pos] != '\n') throw ParseError("experience blocks must be newline separated");
      ++pos;
    }
    if (text.compare(pos, kOpenTag.size(), kOpenTag) != 0 || text[pos + kOpenTag.size()] != '\n') {
      throw ParseError(fmt::format("expected <EXPERIENCE> at offset {}", pos));
    }
    pos += kOpenTag.size() + 1;
    Experience e;
    e.state = take_line(text, pos, "State: ");
    e.action = take_line(text, pos, "Action: ");
    const std::string reward = take_line(text, pos, "Reward: ");
    try {
      std::size_t used = 0;
      e.reward = std::stod(reward, &used);
      if (used != reward.size()) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError(fmt::format("bad reward '{}'", reward));
    }
    e.next_state = take_line(text, pos, "Next state: ");
    if (text.compare(pos, kCloseTag.size(), kCloseTag) != 0) throw ParseError("expected </EXPERIENCE>");
    pos += kCloseTag.size();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace psrl::llm
