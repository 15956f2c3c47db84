#include "psrl/llm/parse.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include <fmt/format.h>

namespace psrl::llm {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_decoration(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\'' || c == '`' || c == '*' || c == '.' ||
         c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '(' || c == ')' || c == '[' || c == ']';
}

std::string strip_decoration(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_decoration(s[b])) ++b;
  while (e > b && is_decoration(s[e - 1])) --e;
  return s.substr(b, e - b);
}

const std::string* match_legal(const std::string& candidate, const std::vector<std::string>& legal) {
  const std::string key = lower(strip_decoration(candidate));
  if (key.empty()) return nullptr;
  for (const auto& a : legal) {
    if (lower(strip_decoration(a)) == key) return &a;
  }
  return nullptr;
}

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

const std::string* unique_mention(const std::string& text, const std::vector<std::string>& legal) {
  std::set<const std::string*> found;
  for (const auto& w : words(text)) {
    if (const std::string* a = match_legal(w, legal)) found.insert(a);
  }
  return found.size() == 1 ? *found.begin() : nullptr;
}

const std::regex& number_regex() {
  static const std::regex re(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)");
  return re;
}

}  // namespace

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string parse_action(const std::string& response, const std::vector<std::string>& legal_actions) {
  static const std::regex marker(R"(action\s*:)", std::regex::icase);
  std::string after;
  bool has_marker = false;
  for (auto it = std::sregex_iterator(response.begin(), response.end(), marker); it != std::sregex_iterator(); ++it) {
    after = response.substr(static_cast<std::size_t>(it->position() + it->length()));
    has_marker = true;
  }
  if (legal_actions.empty()) {
    std::string text = trim(has_marker ? after : response);
    if (text.empty()) throw UnparseableAction("empty free-text action");
    return text;
  }
  if (has_marker) {
    const std::string line = trim(after.substr(0, after.find('\n')));
    if (const std::string* a = match_legal(line, legal_actions)) return *a;
    const auto ws = words(line);
    if (!ws.empty()) {
      if (const std::string* a = match_legal(ws.front(), legal_actions)) return *a;
    }
    if (const std::string* a = unique_mention(after, legal_actions)) return *a;
  }
  if (const std::string* a = match_legal(response, legal_actions)) return *a;
  if (const std::string* a = unique_mention(response, legal_actions)) return *a;
  throw UnparseableAction(fmt::format("no legal action recoverable from response '{}'", response));
}

ParsedSample parse_sample(const std::string& response) {
  const std::size_t pos = response.rfind("You think");
  if (pos == std::string::npos) return {response, false};
  return {trim(response.substr(pos)), true};
}

double parse_first_number(const std::string& text) {
  std::smatch m;
  if (!std::regex_search(text, m, number_regex())) throw UnparseableScalar(fmt::format("no number in '{}'", text));
  return std::stod(m.str());
}

double parse_scalar(const std::string& response, const std::string& marker, ScalarOptions options) {
  const std::size_t pos = response.rfind(marker);
  if (pos == std::string::npos) throw UnparseableScalar(fmt::format("marker '{}' not found", marker));
  double value;
  try {
    value = parse_first_number(response.substr(pos + marker.size()));
  } catch (const UnparseableScalar&) {
    throw UnparseableScalar(fmt::format("no number after '{}'", marker));
  }
  value = std::max(value, 0.0);
  if (options.unit_interval) value = std::min(value, 1.0);
  return value;
}

}  // namespace psrl::llm
