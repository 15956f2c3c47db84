#pragma once

#include <map>
#include <string>
#include <vector>

#include "psrl/core/errors.hpp"

namespace psrl::llm {

using Bindings = std::map<std::string, std::string>;

class TemplateError : public Error {
 public:
  using Error::Error;
};

// A prompt body with {{Name}} placeholders.
class PromptTemplate {
 public:
  PromptTemplate() = default;
  PromptTemplate(std::string id, std::string body);

  const std::string& id() const { return id_; }
  const std::string& body() const { return body_; }
  // Distinct placeholder names in order of first appearance.
  const std::vector<std::string>& placeholders() const { return placeholders_; }

 private:
  std::string id_;
  std::string body_;
  std::vector<std::string> placeholders_;
};

// Substitutes every placeholder. Throws TemplateError listing all missing
// and all unused binding names.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

// Inverse of render_prompt: recovers the bindings that produced `rendered`.
// Each value ends at the first following occurrence of the next literal
// segment. Throws TemplateError if the text does not fit the template.
Bindings extract_bindings(const PromptTemplate& tmpl, const std::string& rendered);

// Built-in templates plus optional overrides. Override bodies are parsed the
// same way and replace the built-in of the same id.
class TemplateRegistry {
 public:
  TemplateRegistry();

  const PromptTemplate& get(const std::string& id) const;
  bool contains(const std::string& id) const { return templates_.count(id) > 0; }
  void override_template(const std::string& id, std::string body);
  std::vector<std::string> ids() const;

  std::string render(const std::string& id, const Bindings& bindings) const {
    return render_prompt(get(id), bindings);
  }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

// Shared process-wide registry with the built-in bodies only.
const TemplateRegistry& default_registry();

}  // namespace psrl::llm
