#include "psrl/agents/llm_agents.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "psrl/core/errors.hpp"
#include "psrl/llm/serialize.hpp"

namespace psrl {

using llm::Bindings;
using llm::Prompt;

namespace {

constexpr const char* kEnv = "Environment Description";
constexpr const char* kPrior = "Input prior/LLM-generated posterior";

std::string join_lines(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += '\n';
    out += p;
  }
  return out;
}

}  // namespace

std::optional<std::string> PolicyCache::lookup(const std::string& state) const {
  const auto it = map_.find(state);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

ReplayBuffer::ReplayBuffer(double keep_probability) : p_(keep_probability) {
  if (!(p_ > 0.0 && p_ <= 1.0)) throw ConfigError({fmt::format("keep probability {} is outside (0, 1]", p_)});
}

std::vector<std::size_t> ReplayBuffer::sample(Rng& rng) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < episodes_.size(); ++i)
    if (p_ >= 1.0 || bernoulli(rng, p_)) out.push_back(i);
  return out;
}

std::string ReflectionLog::render() const {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < reflections.size(); ++i)
    lines.push_back(fmt::format("Reflection {}: {}", i + 1, reflections[i]));
  return join_lines(lines);
}

std::size_t EpisodeCallCounts::of(const std::string& role) const {
  const auto it = calls.find(role);
  return it == calls.end() ? 0 : it->second;
}

LlmAgentBase::LlmAgentBase(LlmAgentContext context, Rng rng) : ctx_(std::move(context)), rng_(rng) {
  if (!ctx_.client) throw Error("llm agent: no client");
  if (!ctx_.legal_actions) throw Error("llm agent: no action-set function");
}

void LlmAgentBase::begin_episode(std::size_t episode_index) {
  episode_ = episode_index;
  episode_calls_.push_back(EpisodeCallCounts{episode_index, {}, 0, 0});
  cache_.clear();
  at(0);
}

std::optional<std::string> LlmAgentBase::cached(const std::string& state) {
  if (!ctx_.policy_cache) return std::nullopt;
  if (auto hit = cache_.lookup(state)) {
    ++stats_.cache_hits;
    return hit;
  }
  ++current().novel_states;
  return std::nullopt;
}

void LlmAgentBase::remember(const std::string& state, const std::string& action) {
  if (ctx_.policy_cache) cache_.store(state, action);
}

const llm::TemplateRegistry& LlmAgentBase::registry() const {
  return ctx_.registry ? *ctx_.registry : llm::default_registry();
}

Prompt LlmAgentBase::prompt(const std::string& id, Bindings bindings) const {
  return Prompt::from_template(registry(), id, std::move(bindings));
}

Prompt LlmAgentBase::described(const std::string& id) const {
  return prompt(id, {{kEnv, ctx_.environment_description}});
}

void LlmAgentBase::at(std::size_t timestep) { ctx_.client->set_position(episode_, timestep); }

void LlmAgentBase::warn(std::string message) { stats_.warnings.push_back(std::move(message)); }

std::string LlmAgentBase::call(const std::string& role, Prompt system, Prompt user, double temperature) {
  ++stats_.calls[role];
  if (!episode_calls_.empty()) ++current().calls[role];
  llm::ChatRequest req;
  req.role_tag = role;
  req.system = std::move(system);
  req.user = std::move(user);
  req.temperature = temperature;
  return ctx_.client->complete(std::move(req)).response_text;
}

namespace {

std::string resend(llm::LlmClient& client, const std::string& role, const Prompt& system, const Prompt& user,
                   double temperature) {
  llm::ChatRequest req;
  req.role_tag = role;
  req.system = system;
  req.user = user;
  req.temperature = temperature;
  return client.complete(std::move(req)).response_text;
}

}  // namespace

std::string LlmAgentBase::call_for_action(const std::string& role, const Prompt& system, const Prompt& user,
                                          double temperature, const std::vector<std::string>& legal) {
  const std::string first = call(role, system, user, temperature);
  try {
    return llm::parse_action(first, legal);
  } catch (const llm::UnparseableAction&) {
  }
  ++stats_.reprompts;
  const std::string second = resend(*ctx_.client, role, system, user, temperature);
  try {
    return llm::parse_action(second, legal);
  } catch (const llm::UnparseableAction& e) {
    if (legal.empty()) throw;
    ++stats_.fallbacks;
    warn(fmt::format("episode {}: {} reply unparseable twice, acting uniformly at random", episode_, role));
    return legal[uniform_index(rng_, legal.size())];
  }
}

double LlmAgentBase::call_for_scalar(const std::string& role, const Prompt& system, const Prompt& user,
                                     double temperature, const std::string& marker, llm::ScalarOptions options) {
  const std::string first = call(role, system, user, temperature);
  try {
    return llm::parse_scalar(first, marker, options);
  } catch (const llm::UnparseableScalar&) {
  }
  ++stats_.reprompts;
  return llm::parse_scalar(resend(*ctx_.client, role, system, user, temperature), marker, options);
}

double LlmAgentBase::call_for_number(const std::string& role, const Prompt& system, const Prompt& user,
                                     double temperature) {
  const std::string first = call(role, system, user, temperature);
  try {
    return llm::parse_first_number(first);
  } catch (const llm::UnparseableScalar&) {
  }
  ++stats_.reprompts;
  return llm::parse_first_number(resend(*ctx_.client, role, system, user, temperature));
}

LlmPsrlAgent::LlmPsrlAgent(LlmAgentContext context, LlmPsrlConfig config, Rng rng)
    : LlmAgentBase(std::move(context), rng), config_(std::move(config)) {
  config_.temperatures.validate();
  if (llm::trim(config_.initial_prior).empty()) throw ConfigError({"llm psrl: the initial prior is empty"});
  posterior_.text = config_.initial_prior;
}

void LlmPsrlAgent::begin_episode(std::size_t episode_index) {
  LlmAgentBase::begin_episode(episode_index);
  const std::string reply = call("posterior_sampler", described(config_.sampler_system_template),
                                 prompt(config_.sampler_user_template, {{kPrior, posterior_.text}}),
                                 config_.temperatures.sampling);
  const auto parsed = llm::parse_sample(reply);
  if (!parsed.marker_found) {
    ++stats_.missing_sample_marker;
    warn(fmt::format("episode {}: posterior sample lacks \"You think\", using the whole reply", episode_index));
  }
  hypothesis_ = parsed.hypothesis;
  hypotheses_.push_back(hypothesis_);
}

std::string LlmPsrlAgent::select_action(const std::string& state, std::size_t timestep) {
  at(timestep);
  if (auto hit = cached(state)) return *hit;
  const std::string action =
      call_for_action("sample_policy",
                      prompt("sample_policy.system",
                             {{kEnv, ctx_.environment_description}, {"LLM-generated posterior sample", hypothesis_}}),
                      Prompt::raw(state), config_.temperatures.policy, ctx_.legal_actions(state));
  remember(state, action);
  return action;
}

void LlmPsrlAgent::end_episode(const Trajectory& trajectory) {
  current().steps = trajectory.steps.size();
  auto adopt = [&](const std::string& reply) {
    const std::string text = llm::trim(reply);
    if (text.empty()) {
      warn(fmt::format("episode {}: empty posterior update, keeping the prior", episode_));
      return;
    }
    posterior_.text = text;
  };
  if (config_.update_mode == PosteriorUpdateMode::WholeTrajectory) {
    at(trajectory.steps.size());
    adopt(call("posterior_updater", described("posterior_update.whole.system"),
               prompt("posterior_update.whole.user",
                      {{kPrior, posterior_.text}, {"Full trajectory", llm::render_trajectory(trajectory)}}),
               config_.temperatures.posterior));
  } else {
    for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
      at(i + 1);
      adopt(call("posterior_updater", described("posterior_update.step.system"),
                 prompt("posterior_update.step.user",
                        {{kPrior, posterior_.text},
                         {"Single next-state transition and reward", llm::render_experience(trajectory.steps[i])}}),
                 config_.temperatures.posterior));
    }
  }
  ++posterior_.version;
}

std::optional<std::string> check_llm_psrl_calls(const EpisodeCallCounts& c, PosteriorUpdateMode mode, bool policy_cache) {
  std::vector<std::string> problems;
  if (c.of("posterior_sampler") != 1) problems.push_back(fmt::format("{} sampler calls", c.of("posterior_sampler")));
  const std::size_t want_policy = policy_cache ? c.novel_states : c.steps;
  if (c.of("sample_policy") != want_policy || c.of("sample_policy") > c.steps) {
    problems.push_back(fmt::format("{} policy calls for {} steps ({} novel states)", c.of("sample_policy"), c.steps,
                                   c.novel_states));
  }
  const std::size_t want_update = mode == PosteriorUpdateMode::WholeTrajectory ? 1 : c.steps;
  if (c.of("posterior_updater") != want_update) {
    problems.push_back(fmt::format("{} updater calls, expected {}", c.of("posterior_updater"), want_update));
  }
  if (problems.empty()) return std::nullopt;
  std::string msg = fmt::format("episode {}:", c.episode);
  for (const auto& p : problems) msg += " " + p + ";";
  msg.pop_back();
  return msg;
}

LlmIdsAgent::LlmIdsAgent(LlmAgentContext context, LlmIdsConfig config, Rng rng)
    : LlmAgentBase(std::move(context), rng), config_(std::move(config)) {
  config_.temperatures.validate();
  if (llm::trim(config_.initial_prior).empty()) throw ConfigError({"llm ids: the initial prior is empty"});
  posterior_.text = config_.initial_prior;
}

std::string LlmIdsAgent::select_action(const std::string& state, std::size_t timestep) {
  timestep_ = timestep;
  at(timestep);
  if (auto hit = cached(state)) return *hit;
  const auto legal = ctx_.legal_actions(state);
  if (legal.empty()) throw Error("llm ids needs a finite action set");
  IdsDecisionRecord rec;
  const double temp = config_.temperatures.policy;
  for (const auto& a : legal) {
    if (config_.mode == IdsMode::Bandit) {
      rec.inputs.rho.push_back(call_for_scalar("ids_regret", described("ids.bandit.regret.system"),
                                               prompt("ids.bandit.regret.user", {{kPrior, posterior_.text}, {"Candidate action", a}}),
                                               temp, llm::kRegretMarker, {true}));
      rec.inputs.info.push_back(call_for_scalar("ids_info", described("ids.bandit.info.system"),
                                                prompt("ids.bandit.info.user", {{kPrior, posterior_.text}, {"Candidate action", a}}),
                                                temp, llm::kInfoMarker, {}));
    } else {
      const Bindings b{{kPrior, posterior_.text}, {"Current state", state}, {"Candidate action", a}};
      const double value = call_for_scalar("ids_regret", described("ids.mdp.value.system"), prompt("ids.mdp.value.user", b),
                                           temp, llm::kValueMarker, {});
      rec.inputs.rho.push_back(std::max(0.0, config_.optimal_value - value));
      rec.inputs.info.push_back(call_for_scalar("ids_info", described("ids.mdp.info.system"), prompt("ids.mdp.info.user", b),
                                                temp, llm::kInfoMarker, {}));
    }
  }
  try {
    rec.distribution = minimize_info_ratio(rec.inputs, config_.grid_size);
  } catch (const NoFiniteRatio&) {
    ++stats_.fallbacks;
    warn(fmt::format("episode {}, timestep {}: no action has positive information gain, taking the lowest regret",
                     episode_, timestep));
    const auto best = static_cast<std::size_t>(
        std::min_element(rec.inputs.rho.begin(), rec.inputs.rho.end()) - rec.inputs.rho.begin());
    rec.distribution = IdsDistribution{best, best, 1.0, kInfiniteRatio};
  }
  rec.action = legal[rec.distribution.sample(rng_)];
  decisions_.push_back(rec);
  remember(state, rec.action);
  return rec.action;
}

void LlmIdsAgent::observe_step(const Experience& step) {
  at(timestep_);
  const std::string reply =
      call("posterior_updater", described("posterior_update.step.system"),
           prompt("posterior_update.step.user",
                  {{kPrior, posterior_.text}, {"Single next-state transition and reward", llm::render_experience(step)}}),
           config_.temperatures.posterior);
  const std::string text = llm::trim(reply);
  if (text.empty()) {
    warn(fmt::format("episode {}: empty posterior update, keeping the prior", episode_));
  } else {
    posterior_.text = text;
  }
  ++posterior_.version;
}

IcrlAgent::IcrlAgent(LlmAgentContext context, IcrlConfig config, Rng rng)
    : LlmAgentBase(std::move(context), rng), config_(config), buffer_(config.keep_probability) {}

void IcrlAgent::begin_episode(std::size_t episode_index) {
  LlmAgentBase::begin_episode(episode_index);
  partial_.clear();
}

std::string IcrlAgent::select_action(const std::string& state, std::size_t timestep) {
  at(timestep);
  if (auto hit = cached(state)) return *hit;
  last_included_ = buffer_.sample(rng_);
  std::vector<std::string> parts;
  for (std::size_t i : last_included_) parts.push_back(buffer_.episodes()[i]);
  parts.push_back(llm::render_experiences(partial_));
  const std::string action = call_for_action("icrl_policy", described("icrl.policy.system"),
                         prompt("icrl.policy.user",
                                {{"(Potentially sub-sampled) history of past episodes", join_lines(parts)}, {"Current state", state}}),
                         config_.temperature, ctx_.legal_actions(state));
  remember(state, action);
  return action;
}

void IcrlAgent::end_episode(const Trajectory& trajectory) {
  current().steps = trajectory.steps.size();
  buffer_.add(llm::render_trajectory(trajectory));
}

ReflexionAgent::ReflexionAgent(LlmAgentContext context, ReflexionConfig config, Rng rng)
    : LlmAgentBase(std::move(context), rng), config_(config) {}

std::string ReflexionAgent::select_action(const std::string& state, std::size_t timestep) {
  at(timestep);
  if (auto hit = cached(state)) return *hit;
  const std::string action = call_for_action(
      "reflexion_policy", described("reflexion.policy.system"),
      prompt("reflexion.policy.user",
             {{"(Potentially sub-sampled) history of past reflections", log_.render()}, {"Current state", state}}),
      config_.temperature, ctx_.legal_actions(state));
  remember(state, action);
  return action;
}

void ReflexionAgent::end_episode(const Trajectory& trajectory) {
  current().steps = trajectory.steps.size();
  at(trajectory.steps.size());
  const std::string reply =
      call("reflexion_reflector", described("reflexion.reflector.system"),
           prompt("reflexion.reflector.user", {{"Full trajectory", llm::render_trajectory(trajectory)}}),
           config_.reflector_temperature);
  log_.reflections.push_back(llm::trim(reply));
  const std::size_t length = log_.render().size();
  if (!warned_ && length > config_.guidance_warning_chars) {
    warned_ = true;
    warn(fmt::format("reflection history is {} characters; all of it is still sent", length));
  }
}

IcpiAgent::IcpiAgent(LlmAgentContext context, IcpiConfig config, Rng rng)
    : LlmAgentBase(std::move(context), rng), config_(config) {
  if (config_.horizon < 1) throw ConfigError({"icpi: horizon must be >= 1"});
  if (config_.rollouts_per_action < 1) throw ConfigError({"icpi: rollouts_per_action must be >= 1"});
}

double IcpiAgent::rollout(const std::string& state, const std::string& action, std::size_t length) {
  std::vector<std::string> transitions, rewards, pairs;
  for (const auto& e : data_) {
    transitions.push_back(llm::render_transition_example(e));
    rewards.push_back(llm::render_reward_example(e));
    pairs.push_back(llm::render_policy_example(e));
  }
  const std::string trans_ctx = join_lines(transitions), reward_ctx = join_lines(rewards), pair_ctx = join_lines(pairs);
  double total = 0.0;
  std::string s = state;
  std::string a = action;
  for (std::size_t i = 0; i < length; ++i) {
    if (i > 0) {
      a = call_for_action("icpi_rollout", described("icpi.rollout.system"),
                          prompt("icpi.rollout.user", {{"Sampled state-action pairs", pair_ctx}, {"Current state", s}}),
                          config_.temperature, ctx_.legal_actions(s));
    }
    total += call_for_number("icpi_reward", described("icpi.reward.system"),
                             prompt("icpi.reward.user", {{"Sample state, action, reward triples", reward_ctx},
                                                         {"Current state", s},
                                                         {"Current action", a}}),
                             config_.temperature);
    if (i + 1 < length) {
      s = llm::trim(call("icpi_transition", described("icpi.transition.system"),
                         prompt("icpi.transition.user", {{"Sampled state, action, next-state triples", trans_ctx},
                                                         {"Current state", s},
                                                         {"Current action", a}}),
                         config_.temperature));
    }
  }
  return total;
}

std::string IcpiAgent::select_action(const std::string& state, std::size_t timestep) {
  at(timestep);
  if (auto hit = cached(state)) return *hit;
  const auto legal = ctx_.legal_actions(state);
  if (legal.empty()) throw Error("icpi needs a finite action set");
  const std::size_t remaining = timestep <= config_.horizon ? config_.horizon - timestep + 1 : 1;
  const std::size_t length = config_.rollout_horizon ? std::min(config_.rollout_horizon, remaining) : remaining;
  last_q_.assign(legal.size(), 0.0);
  for (std::size_t i = 0; i < legal.size(); ++i) {
    for (std::size_t r = 0; r < config_.rollouts_per_action; ++r) last_q_[i] += rollout(state, legal[i], length);
    last_q_[i] /= static_cast<double>(config_.rollouts_per_action);
  }
  const std::string action = legal[argmax_random_tie(last_q_, rng_, 1e-12)];
  remember(state, action);
  return action;
}

std::string build_customer_prior(llm::LlmClient& client, const llm::TemplateRegistry& registry,
                                 const CustomerServiceSpec& spec, double temperature) {
  llm::ChatRequest req;
  req.role_tag = "prior_generator";
  req.system = Prompt::from_template(registry, "customer.prior_generator.system",
                                     {{"Customer service issue sampled from dataset", spec.scenario_text}});
  if (spec.prior_mode == PriorMode::WellSpecified) {
    const std::string hint = registry.render("customer.prior_generator.well_specified",
                                             {{"Solution to sampled dataset issue", spec.true_solution_text}});
    req.system = Prompt::raw(req.system.text + "\n" + hint);
  }
  req.user = Prompt::raw(spec.scenario_text);
  req.temperature = temperature;
  const std::string supplement = llm::trim(client.complete(std::move(req)).response_text);
  const std::string broad = registry.render("customer.broad_prior", {});
  return supplement.empty() ? broad : broad + "\n" + supplement;
}

}  // namespace psrl
