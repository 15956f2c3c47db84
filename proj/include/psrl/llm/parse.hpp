#pragma once

#include <string>
#include <vector>

#include "psrl/core/errors.hpp"

namespace psrl::llm {

class UnparseableAction : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnparseableScalar : public ParseError {
 public:
  using ParseError::ParseError;
};

// Picks the legal action named in a policy response. The text after the last
// "Action:" marker is tried first; otherwise the response is split into
// alphanumeric words and the unique legal action among them is returned.
// Matching ignores case and surrounding whitespace and punctuation. An empty
// legal list means free text: the trimmed response (after any marker) is
// returned. Throws UnparseableAction when nothing is recoverable.
std::string parse_action(const std::string& response, const std::vector<std::string>& legal_actions);

struct ParsedSample {
  std::string hypothesis;
  bool marker_found = false;
};

// The text from the last "You think" onwards, or the whole response when the
// marker is missing (marker_found = false).
ParsedSample parse_sample(const std::string& response);

inline constexpr const char* kRegretMarker = "Final expected regret:";
inline constexpr const char* kInfoMarker = "Final information gain:";
inline constexpr const char* kValueMarker = "Final expected optimal action-value:";

struct ScalarOptions {
  // Clamp into [0, 1] instead of [0, inf).
  bool unit_interval = false;
};

// First decimal number after the last occurrence of `marker`, clamped below
// at 0. Throws UnparseableScalar if the marker or a number is missing.
double parse_scalar(const std::string& response, const std::string& marker, ScalarOptions options = {});

// First decimal number anywhere in the text; throws UnparseableScalar.
double parse_first_number(const std::string& text);

std::string trim(const std::string& s);

}  // namespace psrl::llm
