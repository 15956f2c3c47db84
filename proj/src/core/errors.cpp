#include "psrl/core/errors.hpp"

namespace psrl {
namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration (" + std::to_string(problems.size()) + " problem";
  out += problems.size() == 1 ? ")" : "s)";
  for (const auto& p : problems) out += "\n  - " + p;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace psrl
