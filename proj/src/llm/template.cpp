#include "psrl/llm/template.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "psrl/llm/template_registry.hpp"

namespace psrl::llm {
namespace {

constexpr std::string_view kOpen = "{{";
constexpr std::string_view kClose = "}}";

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string id, std::string body) : id_(std::move(id)), body_(std::move(body)) {
  std::size_t pos = 0;
  while ((pos = body_.find(kOpen, pos)) != std::string::npos) {
    const std::size_t end = body_.find(kClose, pos + kOpen.size());
    if (end == std::string::npos) throw TemplateError(fmt::format("template '{}': unterminated placeholder", id_));
    std::string name = body_.substr(pos + kOpen.size(), end - pos - kOpen.size());
    if (name.empty()) throw TemplateError(fmt::format("template '{}': empty placeholder", id_));
    if (std::find(placeholders_.begin(), placeholders_.end(), name) == placeholders_.end()) {
      placeholders_.push_back(std::move(name));
    }
    pos = end + kClose.size();
  }
}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
  std::vector<std::string> missing;
  for (const auto& name : tmpl.placeholders()) {
    if (!bindings.count(name)) missing.push_back(name);
  }
  std::vector<std::string> extra;
  const std::set<std::string> declared(tmpl.placeholders().begin(), tmpl.placeholders().end());
  for (const auto& [name, value] : bindings) {
    if (!declared.count(name)) extra.push_back(name);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = fmt::format("template '{}':", tmpl.id());
    if (!missing.empty()) msg += " missing bindings [" + join(missing) + "]";
    if (!extra.empty()) msg += " unused bindings [" + join(extra) + "]";
    throw TemplateError(msg);
  }

  const std::string& body = tmpl.body();
  std::string out;
  out.reserve(body.size());
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = body.find(kOpen, pos);
    if (open == std::string::npos) {
      out.append(body, pos, std::string::npos);
      break;
    }
    out.append(body, pos, open - pos);
    const std::size_t close = body.find(kClose, open + kOpen.size());
    out += bindings.at(body.substr(open + kOpen.size(), close - open - kOpen.size()));
    pos = close + kClose.size();
  }
  return out;
}

Bindings extract_bindings(const PromptTemplate& tmpl, const std::string& rendered) {
  const std::string& body = tmpl.body();
  std::vector<std::string> literals;
  std::vector<std::string> names;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = body.find(kOpen, pos);
    if (open == std::string::npos) {
      literals.push_back(body.substr(pos));
      break;
    }
    literals.push_back(body.substr(pos, open - pos));
    const std::size_t close = body.find(kClose, open + kOpen.size());
    names.push_back(body.substr(open + kOpen.size(), close - open - kOpen.size()));
    pos = close + kClose.size();
  }
  auto mismatch = [&](const std::string& why) {
    return TemplateError(fmt::format("text does not match template '{}': {}", tmpl.id(), why));
  };
  if (names.empty()) {
    if (rendered != body) throw mismatch("body differs");
    return {};
  }
  if (rendered.compare(0, literals[0].size(), literals[0]) != 0) throw mismatch("prefix differs");
  const std::string& tail = literals.back();
  if (rendered.size() < literals[0].size() + tail.size() ||
      rendered.compare(rendered.size() - tail.size(), tail.size(), tail) != 0) {
    throw mismatch("suffix differs");
  }
  Bindings out;
  std::size_t cursor = literals[0].size();
  const std::size_t limit = rendered.size() - tail.size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::size_t end;
    if (i + 1 == names.size()) {
      end = limit;
    } else {
      if (literals[i + 1].empty()) throw mismatch("adjacent placeholders are ambiguous");
      end = rendered.find(literals[i + 1], cursor);
      if (end == std::string::npos || end > limit) throw mismatch(fmt::format("segment after '{}' not found", names[i]));
    }
    if (end < cursor) throw mismatch("overlapping segments");
    std::string value = rendered.substr(cursor, end - cursor);
    auto [it, fresh] = out.emplace(names[i], value);
    if (!fresh && it->second != value) throw mismatch(fmt::format("placeholder '{}' bound inconsistently", names[i]));
    cursor = end + (i + 1 < names.size() ? literals[i + 1].size() : 0);
  }
  return out;
}

TemplateRegistry::TemplateRegistry() {
  for (const auto& src : builtin_templates()) {
    templates_.emplace(src.id, PromptTemplate(src.id, src.body));
  }
}

const PromptTemplate& TemplateRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw TemplateError(fmt::format("unknown template id '{}'", id));
  return it->second;
}

void TemplateRegistry::override_template(const std::string& id, std::string body) {
  templates_.insert_or_assign(id, PromptTemplate(id, std::move(body)));
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, t] : templates_) out.push_back(id);
  return out;
}

const TemplateRegistry& default_registry() {
  static const TemplateRegistry registry;
  return registry;
}

}  // namespace psrl::llm
