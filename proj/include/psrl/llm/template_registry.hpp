#pragma once

#include <vector>

namespace psrl::llm {

struct TemplateSource {
  const char* id;
  const char* body;
};

// Every built-in prompt body, keyed by template id.
const std::vector<TemplateSource>& builtin_templates();

}  // namespace psrl::llm
