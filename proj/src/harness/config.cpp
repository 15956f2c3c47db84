#include "psrl/harness/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "json.hpp"
#include "psrl/core/errors.hpp"
#include "psrl/envs/guess.hpp"
#include "psrl/llm/template.hpp"

namespace psrl::harness {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Typed access that records problems instead of throwing.
class Reader {
 public:
  explicit Reader(std::string base_dir) : base_(std::move(base_dir)) {}

  std::vector<std::string> problems;

  void keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      problems.push_back(fmt::format("{}: expected an object", where));
      return;
    }
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) problems.push_back(fmt::format("{}.{}: unknown key", where, k));
  }

  template <typename T>
  std::optional<T> opt(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    const json& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
          throw std::invalid_argument("expected a non-negative integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
      }
      return v.get<T>();
    } catch (const std::exception& e) {
      problems.push_back(fmt::format("{}.{}: {}", where, key, e.what()));
      return std::nullopt;
    }
  }

  template <typename T>
  T get(const json& obj, const std::string& key, const std::string& where, T fallback) {
    return opt<T>(obj, key, where).value_or(std::move(fallback));
  }

  std::string path(const std::string& p) const {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base_) / p).lexically_normal().string();
  }

  std::string text_or_file(const json& obj, const std::string& text_key, const std::string& file_key,
                           const std::string& where) {
    auto text = opt<std::string>(obj, text_key, where);
    auto file = opt<std::string>(obj, file_key, where);
    if (text && file) problems.push_back(fmt::format("{}: give {} or {}, not both", where, text_key, file_key));
    if (file) {
      try {
        return read_text(path(*file));
      } catch (const Error& e) {
        problems.push_back(fmt::format("{}.{}: {}", where, file_key, e.what()));
      }
    }
    return text.value_or("");
  }

 private:
  std::string base_;
};

const std::set<std::string> kEnvironments{"bernoulli", "informative", "riverswim", "comblock", "wordle", "customer"};
const std::set<std::string> kAgents{"random", "thompson", "vanilla_psrl", "bayes_lock", "llm_psrl",
                                    "llm_ids", "icrl",    "reflexion",    "icpi"};
// Rendered by environments from the built-in bodies.
const std::set<std::string> kEnvironmentRendered{
    "bernoulli.description", "informative.description", "riverswim.description", "comblock.description",
    "wordle.description",    "customer.description",    "customer.simulator.system", "customer.judge.system"};
const std::set<std::string> kLlmAgents{"llm_psrl", "llm_ids", "icrl", "reflexion", "icpi"};

bool is_bandit(const std::string& env) { return env == "bernoulli" || env == "informative" || env == "customer"; }

void parse_environment(Reader& r, const json& j, EnvironmentConfig& e) {
  const std::string w = "environment";
  e.id = r.get<std::string>(j, "id", w, "");
  if (e.id.empty()) {
    r.problems.push_back("environment.id: required");
    return;
  }
  if (!kEnvironments.count(e.id)) {
    r.problems.push_back(fmt::format("environment.id: unknown environment '{}'", e.id));
    return;
  }
  if (e.id == "bernoulli") {
    r.keys(j, w, {"id", "arms", "best_mean", "rest_mean", "arm_means", "arm_labels"});
    e.arms = r.get<std::size_t>(j, "arms", w, 5);
    e.best_mean = r.get<double>(j, "best_mean", w, 0.6);
    e.rest_mean = r.get<double>(j, "rest_mean", w, 0.4);
    e.arm_means = r.get<std::vector<double>>(j, "arm_means", w, {});
    e.arm_labels = r.get<std::vector<std::string>>(j, "arm_labels", w, {});
    if (!e.arm_means.empty()) e.arms = e.arm_means.size();
    if (e.arms < 2) r.problems.push_back("environment.arms: need at least 2 arms");
    if (!e.arm_labels.empty() && e.arm_labels.size() != e.arms) {
      r.problems.push_back("environment.arm_labels: one label per arm required");
    }
  } else if (e.id == "informative") {
    r.keys(j, w, {"id", "arms", "optimal_arm"});
    e.informative_arms = r.get<std::size_t>(j, "arms", w, 10);
    e.optimal_arm = r.opt<std::size_t>(j, "optimal_arm", w);
    if (e.optimal_arm && (*e.optimal_arm < 1 || *e.optimal_arm > e.informative_arms)) {
      r.problems.push_back("environment.optimal_arm: must lie in 1..arms");
    }
  } else if (e.id == "riverswim") {
    r.keys(j, w, {"id", "length"});
    e.river_length = r.get<std::size_t>(j, "length", w, 3);
    if (e.river_length < 2) r.problems.push_back("environment.length: must be at least 2");
  } else if (e.id == "comblock") {
    r.keys(j, w, {"id", "code"});
    e.code = r.opt<std::string>(j, "code", w);
    if (e.code) {
      try {
        CombLockSpec{*e.code}.validate();
      } catch (const Error& ex) {
        r.problems.push_back(fmt::format("environment.code: {}", ex.what()));
      }
    }
  } else if (e.id == "wordle") {
    r.keys(j, w, {"id", "target", "corpus_file"});
    e.target = r.opt<std::string>(j, "target", w);
    e.corpus_file = r.path(r.get<std::string>(j, "corpus_file", w, ""));
    if (e.corpus_file.empty()) e.corpus_file = bundled_data_path("wordle_words.txt");
    if (e.target) {
      try {
        WordleSpec{*e.target}.validate();
      } catch (const Error& ex) {
        r.problems.push_back(fmt::format("environment.target: {}", ex.what()));
      }
    }
  } else if (e.id == "customer") {
    r.keys(j, w, {"id", "dataset_file", "scenario_index", "prior_mode"});
    e.dataset_file = r.path(r.get<std::string>(j, "dataset_file", w, ""));
    if (e.dataset_file.empty()) e.dataset_file = bundled_data_path("customer_service_sample.json");
    e.scenario_index = r.opt<std::size_t>(j, "scenario_index", w);
    const std::string mode = r.get<std::string>(j, "prior_mode", w, "llm_generated");
    if (mode == "llm_generated") {
      e.prior_mode = PriorMode::LlmGenerated;
    } else if (mode == "well_specified") {
      e.prior_mode = PriorMode::WellSpecified;
    } else {
      r.problems.push_back("environment.prior_mode: expected llm_generated or well_specified");
    }
  }
}

void parse_agent(Reader& r, const json& j, const EnvironmentConfig& env, AgentConfig& a) {
  const std::string w = "agent";
  r.keys(j, w,
         {"id", "temperatures", "keep_probability", "grid_size", "prior", "prior_file", "posterior_update",
          "policy_cache", "rollout_horizon", "rollouts_per_action", "alpha0", "ids_mode", "optimal_value",
          "template_overrides"});
  a.id = r.get<std::string>(j, "id", w, "");
  if (a.id.empty()) {
    r.problems.push_back("agent.id: required");
  } else if (!kAgents.count(a.id)) {
    r.problems.push_back(fmt::format("agent.id: unknown agent '{}'", a.id));
  }

  if (is_bandit(env.id) && env.id != "customer") a.temperatures.sampling = 1.2;
  if (j.contains("temperatures")) {
    const json& t = j.at("temperatures");
    r.keys(t, "agent.temperatures", {"sampling", "policy", "posterior"});
    a.temperatures.sampling = r.get<double>(t, "sampling", "agent.temperatures", a.temperatures.sampling);
    a.temperatures.policy = r.get<double>(t, "policy", "agent.temperatures", a.temperatures.policy);
    a.temperatures.posterior = r.get<double>(t, "posterior", "agent.temperatures", a.temperatures.posterior);
  }
  try {
    a.temperatures.validate();
  } catch (const Error& e) {
    r.problems.push_back(fmt::format("agent.temperatures: {}", e.what()));
  }

  a.keep_probability = r.get<double>(j, "keep_probability", w, 1.0);
  if (!(a.keep_probability > 0.0 && a.keep_probability <= 1.0)) {
    r.problems.push_back("agent.keep_probability: must lie in (0, 1]");
  }
  a.grid_size = r.get<std::size_t>(j, "grid_size", w, 1001);
  if (a.grid_size < 2) r.problems.push_back("agent.grid_size: must be at least 2");
  a.prior = r.text_or_file(j, "prior", "prior_file", w);

  a.update_mode = is_bandit(env.id) ? PosteriorUpdateMode::PerStep : PosteriorUpdateMode::WholeTrajectory;
  if (auto m = r.opt<std::string>(j, "posterior_update", w)) {
    if (*m == "whole") {
      a.update_mode = PosteriorUpdateMode::WholeTrajectory;
    } else if (*m == "per_step") {
      a.update_mode = PosteriorUpdateMode::PerStep;
    } else {
      r.problems.push_back("agent.posterior_update: expected whole or per_step");
    }
  }
  a.policy_cache = r.get<bool>(j, "policy_cache", w, env.id == "riverswim");
  a.rollout_horizon = r.get<std::size_t>(j, "rollout_horizon", w, 0);
  a.rollouts_per_action = r.get<std::size_t>(j, "rollouts_per_action", w, 1);
  if (a.rollouts_per_action < 1) r.problems.push_back("agent.rollouts_per_action: must be at least 1");
  a.alpha0 = r.opt<double>(j, "alpha0", w);
  if (a.alpha0 && !(*a.alpha0 > 0.0)) r.problems.push_back("agent.alpha0: must be positive");

  a.ids_mode = is_bandit(env.id) ? IdsMode::Bandit : IdsMode::Mdp;
  if (auto m = r.opt<std::string>(j, "ids_mode", w)) {
    if (*m == "bandit") {
      a.ids_mode = IdsMode::Bandit;
    } else if (*m == "mdp") {
      a.ids_mode = IdsMode::Mdp;
    } else {
      r.problems.push_back("agent.ids_mode: expected bandit or mdp");
    }
  }
  a.optimal_value = r.opt<double>(j, "optimal_value", w);

  if (j.contains("template_overrides")) {
    const json& o = j.at("template_overrides");
    if (!o.is_object()) {
      r.problems.push_back("agent.template_overrides: expected an object");
    } else {
      for (const auto& [id, v] : o.items()) {
        const std::string where = "agent.template_overrides." + id;
        if (!llm::default_registry().contains(id)) {
          r.problems.push_back(fmt::format("{}: no built-in template with this id", where));
          continue;
        }
        if (kEnvironmentRendered.count(id)) {
          r.problems.push_back(fmt::format("{}: rendered by the environment and not overridable", where));
          continue;
        }
        std::string body;
        if (v.is_string()) {
          body = v.get<std::string>();
        } else if (v.is_object()) {
          r.keys(v, where, {"file"});
          body = r.text_or_file(v, "text", "file", where);
        } else {
          r.problems.push_back(fmt::format("{}: expected a body string or {{\"file\": path}}", where));
          continue;
        }
        try {
          const llm::PromptTemplate replacement(id, body);
          const auto& builtin = llm::default_registry().get(id).placeholders();
          const std::set<std::string> want(builtin.begin(), builtin.end());
          const std::set<std::string> got(replacement.placeholders().begin(), replacement.placeholders().end());
          if (want != got) {
            r.problems.push_back(fmt::format("{}: placeholders must be exactly {{{{{}}}}}", where,
                                             fmt::join(builtin, "}}, {{")));
            continue;
          }
        } catch (const Error& e) {
          r.problems.push_back(fmt::format("{}: {}", where, e.what()));
          continue;
        }
        a.template_overrides.emplace_back(id, std::move(body));
      }
    }
  }

  // Agent and environment compatibility.
  const std::string& e = env.id;
  auto incompatible = [&](const std::string& why) {
    r.problems.push_back(fmt::format("agent.id: {} cannot run on {}: {}", a.id, e, why));
  };
  if (a.id == "thompson" && e != "bernoulli") incompatible("needs a Bernoulli bandit");
  if (a.id == "vanilla_psrl" && e != "riverswim") incompatible("needs a tabular MDP");
  if (a.id == "bayes_lock" && e != "comblock") incompatible("needs the combination lock");
  if (a.id == "random" && e == "customer") incompatible("needs a finite action set");
  if ((a.id == "llm_ids" || a.id == "icpi") && e == "customer") incompatible("needs a finite action set");
}

void parse_backend(Reader& r, const json& j, BackendConfig& b) {
  const std::string w = "backend";
  r.keys(j, w,
         {"kind", "script", "script_file", "default_response", "input_tokens", "output_tokens", "base_url",
          "api_key_env", "max_tokens", "timeout_seconds", "requests_per_minute", "tokens_per_minute", "model",
          "models", "omit_temperature", "retry"});
  b.kind = r.get<std::string>(j, "kind", w, "scripted");
  if (b.kind != "scripted" && b.kind != "oracle" && b.kind != "openai") {
    r.problems.push_back(fmt::format("backend.kind: unknown backend '{}'", b.kind));
  }

  json script = json::array();
  if (j.contains("script")) script = j.at("script");
  if (auto f = r.opt<std::string>(j, "script_file", w)) {
    try {
      script = json::parse(read_text(r.path(*f)));
    } catch (const std::exception& e) {
      r.problems.push_back(fmt::format("backend.script_file: {}", e.what()));
    }
  }
  if (!script.is_array()) {
    r.problems.push_back("backend.script: expected an array of rules");
  } else {
    for (std::size_t i = 0; i < script.size(); ++i) {
      const std::string where = fmt::format("backend.script[{}]", i);
      const json& rule = script[i];
      r.keys(rule, where, {"role", "pattern", "responses"});
      llm::ScriptRule sr;
      sr.role_tag = r.get<std::string>(rule, "role", where, "");
      sr.pattern = r.get<std::string>(rule, "pattern", where, "");
      sr.responses = r.get<std::vector<std::string>>(rule, "responses", where, {});
      if (!sr.role_tag.empty() && !llm::is_role_tag(sr.role_tag)) {
        r.problems.push_back(fmt::format("{}.role: unknown role '{}'", where, sr.role_tag));
      }
      if (sr.responses.empty()) r.problems.push_back(fmt::format("{}.responses: at least one response required", where));
      try {
        std::regex check(sr.pattern);
      } catch (const std::regex_error& e) {
        r.problems.push_back(fmt::format("{}.pattern: {}", where, e.what()));
      }
      b.script.push_back(std::move(sr));
    }
  }
  b.script_options.default_response = r.opt<std::string>(j, "default_response", w);
  b.script_options.input_tokens = r.get<std::uint64_t>(j, "input_tokens", w, 100);
  b.script_options.output_tokens = r.get<std::uint64_t>(j, "output_tokens", w, 50);
  if (b.kind == "scripted" && b.script.empty() && !b.script_options.default_response) {
    r.problems.push_back("backend.script: a scripted backend needs rules or a default_response");
  }

  b.openai.base_url = r.get<std::string>(j, "base_url", w, b.openai.base_url);
  b.openai.api_key_env = r.get<std::string>(j, "api_key_env", w, b.openai.api_key_env);
  b.openai.max_tokens = r.opt<std::uint64_t>(j, "max_tokens", w);
  b.openai.timeout_seconds = r.get<double>(j, "timeout_seconds", w, b.openai.timeout_seconds);
  b.requests_per_minute = r.get<double>(j, "requests_per_minute", w, 0.0);
  b.tokens_per_minute = r.get<double>(j, "tokens_per_minute", w, 0.0);

  b.models.default_model = r.get<std::string>(j, "model", w, b.kind == "openai" ? "gpt-4o" : b.kind);
  if (j.contains("models")) {
    const json& m = j.at("models");
    if (!m.is_object()) {
      r.problems.push_back("backend.models: expected an object of role to model name");
    } else {
      for (const auto& [role, name] : m.items()) {
        if (!llm::is_role_tag(role)) r.problems.push_back(fmt::format("backend.models.{}: unknown role", role));
        if (!name.is_string()) {
          r.problems.push_back(fmt::format("backend.models.{}: expected a string", role));
        } else {
          b.models.model_per_role[role] = name.get<std::string>();
        }
      }
    }
  }
  for (const auto& role : r.get<std::vector<std::string>>(j, "omit_temperature", w, {})) {
    if (!llm::is_role_tag(role)) r.problems.push_back(fmt::format("backend.omit_temperature: unknown role '{}'", role));
    b.models.omit_temperature_roles.insert(role);
  }
  if (j.contains("retry")) {
    const json& rt = j.at("retry");
    const std::string rw = "backend.retry";
    r.keys(rt, rw, {"max_attempts", "initial_backoff_seconds", "multiplier", "max_backoff_seconds"});
    b.retry.max_attempts = r.get<std::size_t>(rt, "max_attempts", rw, b.retry.max_attempts);
    b.retry.initial_backoff_seconds = r.get<double>(rt, "initial_backoff_seconds", rw, b.retry.initial_backoff_seconds);
    b.retry.multiplier = r.get<double>(rt, "multiplier", rw, b.retry.multiplier);
    b.retry.max_backoff_seconds = r.get<double>(rt, "max_backoff_seconds", rw, b.retry.max_backoff_seconds);
    if (b.retry.max_attempts < 1) r.problems.push_back("backend.retry.max_attempts: must be at least 1");
  }
}

}  // namespace

bool ExperimentConfig::uses_llm() const { return kLlmAgents.count(agent.id) > 0 || environment.id == "customer"; }

std::string bundled_data_path(const std::string& relative) {
  const char* env = std::getenv("PSRL_DATA_DIR");
  const std::string root = env && *env ? env : PSRL_DATA_DIR;
  return (fs::path(root) / relative).string();
}

EpisodeBudget default_budget(const EnvironmentConfig& env) {
  if (env.id == "bernoulli" || env.id == "informative") return {100, 1};
  if (env.id == "comblock") return {8, 3};
  if (env.id == "wordle") return {6, 5};
  if (env.id == "riverswim") return env.river_length == 4 ? EpisodeBudget{35, 20} : EpisodeBudget{35, 6};
  if (env.id == "customer") return {20, 1};
  return {};
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir, const std::string& default_name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({fmt::format("not valid JSON: {}", e.what())});
  }
  Reader r(base_dir);
  ExperimentConfig c;
  r.keys(doc, "config",
         {"name", "environment", "agent", "budget", "trials", "seed", "parallel", "backend", "output_dir", "prices"});
  if (!doc.is_object()) throw ConfigError(r.problems);
  c.name = r.get<std::string>(doc, "name", "config", default_name);

  if (!doc.contains("environment")) {
    r.problems.push_back("environment: required");
  } else {
    parse_environment(r, doc.at("environment"), c.environment);
  }
  if (!doc.contains("agent")) {
    r.problems.push_back("agent: required");
  } else {
    parse_agent(r, doc.at("agent"), c.environment, c.agent);
  }

  c.budget = default_budget(c.environment);
  if (doc.contains("budget")) {
    const json& b = doc.at("budget");
    r.keys(b, "budget", {"episodes", "horizon"});
    c.budget.episodes = r.get<std::size_t>(b, "episodes", "budget", c.budget.episodes);
    c.budget.horizon = r.get<std::size_t>(b, "horizon", "budget", c.budget.horizon);
  }
  if (c.budget.episodes < 1) r.problems.push_back("budget.episodes: must be at least 1");
  if (c.budget.horizon < 1) r.problems.push_back("budget.horizon: must be at least 1");
  const std::string& e = c.environment.id;
  if ((e == "bernoulli" || e == "informative" || e == "customer") && c.budget.horizon != 1) {
    r.problems.push_back("budget.horizon: bandit episodes have horizon 1");
  }
  if (e == "comblock" && c.budget.horizon != 3) r.problems.push_back("budget.horizon: the lock takes 3 digits per episode");
  if (e == "wordle" && c.budget.horizon != 5) r.problems.push_back("budget.horizon: Wordle takes 5 letters per episode");

  c.trials = r.get<std::size_t>(doc, "trials", "config", 1);
  if (c.trials < 1) r.problems.push_back("trials: must be at least 1");
  c.seed = r.get<std::uint64_t>(doc, "seed", "config", 0);
  c.parallel = r.get<std::size_t>(doc, "parallel", "config", 1);
  if (c.parallel < 1) r.problems.push_back("parallel: must be at least 1");
  c.output_dir = r.path(r.get<std::string>(doc, "output_dir", "config", ""));

  if (doc.contains("backend")) parse_backend(r, doc.at("backend"), c.backend);
  if (!doc.contains("backend") && c.uses_llm()) {
    r.problems.push_back("backend: required for language-model agents and the customer-service environment");
  }
  if (c.backend.kind == "oracle" && e == "customer") {
    r.problems.push_back("backend.kind: the oracle cannot simulate customer-service roles");
  }
  if (c.backend.kind == "oracle" && (c.agent.id == "icrl" || c.agent.id == "reflexion" || c.agent.id == "icpi")) {
    r.problems.push_back("backend.kind: the oracle serves only LLM-PSRL and LLM-IDS roles");
  }
  if (c.backend.kind == "oracle" && c.agent.id == "llm_ids" && e != "informative") {
    r.problems.push_back("backend.kind: oracle IDS scalars exist only for the informative-action bandit");
  }

  if (doc.contains("prices")) {
    const json& p = doc.at("prices");
    r.keys(p, "prices", {"input_per_million", "output_per_million"});
    c.prices.input_per_million = r.get<double>(p, "input_per_million", "prices", c.prices.input_per_million);
    c.prices.output_per_million = r.get<double>(p, "output_per_million", "prices", c.prices.output_per_million);
  }

  if (!r.problems.empty()) throw ConfigError(r.problems);
  c.source_json = doc.dump(2);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    throw ConfigError({e.what()});
  }
  const fs::path p(path);
  return parse_config(text, p.parent_path().empty() ? "." : p.parent_path().string(), p.stem().string());
}

}  // namespace psrl::harness
