#include "psrl/llm/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "psrl/bayes/beliefs.hpp"
#include "psrl/ids/ids.hpp"
#include "psrl/llm/parse.hpp"
#include "psrl/llm/serialize.hpp"
#include "psrl/planning/lock_planner.hpp"
#include "psrl/planning/value_iteration.hpp"

namespace psrl::llm {
namespace {

constexpr const char* kPrior = "Input prior/LLM-generated posterior";

std::size_t index_of(const std::vector<std::string>& labels, const std::string& label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw PermanentBackendError(fmt::format("oracle: unknown label '{}'", label));
  return static_cast<std::size_t>(it - labels.begin());
}

std::size_t argmax_uniform(const std::vector<double>& v, Rng& rng) {
  const double best = *std::max_element(v.begin(), v.end());
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == best) ties.push_back(i);
  return ties[uniform_index(rng, ties.size())];
}

std::vector<std::string> informative_labels(std::size_t arms) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arms; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace

OracleBackend::OracleBackend(OracleSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) {
  if (spec_.sampler_user_template.empty()) throw Error("oracle: sampler user template id required");
  if (spec_.env == OracleEnv::Wordle && spec_.corpus.empty()) throw Error("oracle: Wordle needs a corpus");
  if ((spec_.env == OracleEnv::Bernoulli || spec_.env == OracleEnv::Informative) && spec_.action_labels.empty()) {
    throw Error("oracle: bandits need action labels");
  }
}

const TemplateRegistry& OracleBackend::registry() const {
  return spec_.registry ? *spec_.registry : default_registry();
}

const GuessVocabulary& OracleBackend::vocab() const {
  return spec_.env == OracleEnv::Wordle ? wordle_vocabulary() : lock_vocabulary();
}

std::string OracleBackend::alphabet() const {
  return spec_.env == OracleEnv::Wordle ? "abcdefghijklmnopqrstuvwxyz" : "0123456789";
}

std::size_t OracleBackend::guess_length() const { return spec_.env == OracleEnv::Wordle ? 5 : 3; }

std::string OracleBackend::initial_knowledge() const {
  switch (spec_.env) {
    case OracleEnv::Bernoulli:
      return knowledge::render_beta_knowledge(spec_.action_labels, BetaBelief::uniform(spec_.action_labels.size()));
    case OracleEnv::Informative: {
      std::vector<std::size_t> c;
      for (std::size_t i = 1; i < spec_.action_labels.size(); ++i) c.push_back(i);
      return knowledge::render_informative_knowledge(c);
    }
    case OracleEnv::Lock:
      return knowledge::render_guess_knowledge(vocab(), 3, "0 to 9", {});
    case OracleEnv::Wordle:
      return knowledge::render_guess_knowledge(vocab(), 5, "a to z", {});
    case OracleEnv::Tabular: {
      const std::size_t S = spec_.tabular.states.size(), A = spec_.tabular.actions.size();
      return knowledge::render_tabular_knowledge(spec_.tabular, DirichletBelief::uniform(S, A, 0.1),
                                                 RewardBelief::uniform(S, A));
    }
  }
  return {};
}

std::string OracleBackend::sample(const std::string& text) {
  switch (spec_.env) {
    case OracleEnv::Bernoulli: {
      const BetaBelief b = knowledge::parse_beta_knowledge(spec_.action_labels, text);
      return knowledge::render_reward_hypothesis(spec_.action_labels, beta_sample(b, rng_));
    }
    case OracleEnv::Informative: {
      const auto candidates = knowledge::parse_informative_knowledge(text);
      const std::size_t star = candidates[uniform_index(rng_, candidates.size())];
      std::vector<double> rewards(spec_.action_labels.size(), 0.0);
      rewards[0] = 1.0 / (2.0 * static_cast<double>(star));
      rewards[star] = 1.0;
      return knowledge::render_reward_hypothesis(informative_labels(rewards.size()), rewards);
    }
    case OracleEnv::Lock:
    case OracleEnv::Wordle: {
      const auto facts = knowledge::parse_guess_knowledge(vocab(), text);
      const auto& pool = spec_.env == OracleEnv::Lock ? all_lock_codes() : spec_.corpus;
      std::vector<const std::string*> ok;
      for (const auto& c : pool)
        if (knowledge::consistent_with(c, facts)) ok.push_back(&c);
      if (ok.empty()) throw PermanentBackendError("oracle: no candidate agrees with the stated knowledge");
      return knowledge::render_guess_hypothesis(vocab(), *ok[uniform_index(rng_, ok.size())]);
    }
    case OracleEnv::Tabular: {
      auto [trans, rew] = knowledge::parse_tabular_knowledge(spec_.tabular, text);
      std::vector<double> init(trans.num_states, 0.0);
      init[0] = 1.0;
      return knowledge::render_tabular_hypothesis(spec_.tabular, psrl_sample_mdp(trans, rew, init, spec_.horizon, rng_));
    }
  }
  return {};
}

std::string OracleBackend::act(const std::string& hypothesis, const std::string& state) {
  switch (spec_.env) {
    case OracleEnv::Bernoulli:
    case OracleEnv::Informative: {
      const auto& labels = spec_.env == OracleEnv::Bernoulli ? spec_.action_labels
                                                             : informative_labels(spec_.action_labels.size());
      const auto values = knowledge::parse_reward_hypothesis(labels, hypothesis);
      return spec_.action_labels[argmax_uniform(values, rng_)];
    }
    case OracleEnv::Lock:
    case OracleEnv::Wordle: {
      const std::string guess = knowledge::parse_guess_hypothesis(hypothesis, guess_length(), alphabet());
      const std::size_t pos = parse_guess_state(vocab(), state).size();
      if (pos >= guess.size()) throw PermanentBackendError("oracle: no positions left to fill");
      return std::string(1, guess[pos]);
    }
    case OracleEnv::Tabular: {
      const TabularMdp m = knowledge::parse_tabular_hypothesis(spec_.tabular, hypothesis, spec_.horizon);
      const ValueTable t = value_iteration(m);
      const std::size_t s = index_of(spec_.tabular.states, state);
      std::vector<double> q;
      for (std::size_t a = 0; a < m.num_actions; ++a) q.push_back(t.q_at(0, s, a));
      // Near-ties count as ties, matching greedy_policy.
      const double best = *std::max_element(q.begin(), q.end());
      std::vector<std::size_t> ties;
      for (std::size_t a = 0; a < q.size(); ++a)
        if (q[a] >= best - 1e-12) ties.push_back(a);
      return spec_.tabular.actions[ties[uniform_index(rng_, ties.size())]];
    }
  }
  return {};
}

std::string OracleBackend::update(const std::string& prior, const std::vector<Experience>& steps) const {
  switch (spec_.env) {
    case OracleEnv::Bernoulli: {
      BetaBelief b = knowledge::parse_beta_knowledge(spec_.action_labels, prior);
      for (const auto& e : steps) b = beta_update(b, index_of(spec_.action_labels, e.action), e.reward);
      return knowledge::render_beta_knowledge(spec_.action_labels, b);
    }
    case OracleEnv::Informative: {
      auto candidates = knowledge::parse_informative_knowledge(prior);
      for (const auto& e : steps) {
        const std::size_t a = index_of(spec_.action_labels, e.action);
        if (a == 0) {
          if (!(e.reward > 0)) throw PermanentBackendError("oracle: informative arm paid nothing");
          const auto star = static_cast<std::size_t>(std::llround(1.0 / (2.0 * e.reward)));
          candidates = {star};
        } else if (e.reward >= 1.0) {
          candidates = {a};
        } else {
          candidates.erase(std::remove(candidates.begin(), candidates.end(), a), candidates.end());
        }
      }
      if (candidates.empty()) throw PermanentBackendError("oracle: observations rule out every arm");
      return knowledge::render_informative_knowledge(candidates);
    }
    case OracleEnv::Lock:
    case OracleEnv::Wordle: {
      auto facts = knowledge::parse_guess_knowledge(vocab(), prior);
      for (const auto& e : steps) {
        if (auto f = knowledge::fact_from_transition(vocab(), e.next_state)) {
          if (std::find(facts.begin(), facts.end(), *f) == facts.end()) facts.push_back(*f);
        }
      }
      return knowledge::render_guess_knowledge(vocab(), guess_length(),
                                               spec_.env == OracleEnv::Wordle ? "a to z" : "0 to 9", facts);
    }
    case OracleEnv::Tabular: {
      auto [trans, rew] = knowledge::parse_tabular_knowledge(spec_.tabular, prior);
      for (const auto& e : steps) {
        const std::size_t s = index_of(spec_.tabular.states, e.state);
        const std::size_t a = index_of(spec_.tabular.actions, e.action);
        const std::size_t n = index_of(spec_.tabular.states, e.next_state);
        trans = dirichlet_update(trans, s, a, n);
        rew = reward_update(rew, s, a, e.reward);
      }
      return knowledge::render_tabular_knowledge(spec_.tabular, trans, rew);
    }
  }
  return {};
}

std::string OracleBackend::ids_scalar(const std::string& role, const std::string& text, const std::string& action) const {
  if (spec_.env != OracleEnv::Informative) {
    throw PermanentBackendError("oracle: IDS scalars are only exact for the informative-action bandit");
  }
  const std::size_t K = spec_.action_labels.size() - 1;
  std::vector<double> post(K + 1, 0.0);
  const auto candidates = knowledge::parse_informative_knowledge(text);
  for (std::size_t c : candidates) post.at(c) = 1.0 / static_cast<double>(candidates.size());
  const InfoRatioInputs in = exact_bandit_rho_info(post);
  const std::size_t a = index_of(spec_.action_labels, trim(action));
  if (role == "ids_regret") return fmt::format("Computed exactly. {} {}", kRegretMarker, in.rho[a]);
  return fmt::format("Computed exactly. {} {}", kInfoMarker, in.info[a]);
}

ChatResponse OracleBackend::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  const auto& reg = registry();
  std::string text;
  try {
    if (request.role_tag == "posterior_sampler") {
      const auto b = extract_bindings(reg.get(spec_.sampler_user_template), request.user.text);
      text = "Each value below is a draw from the stated knowledge. " + sample(b.at(kPrior));
    } else if (request.role_tag == "sample_policy") {
      const auto b = extract_bindings(reg.get("sample_policy.system"), request.system.text);
      text = "Action: " + act(b.at("LLM-generated posterior sample"), request.user.text);
    } else if (request.role_tag == "posterior_updater") {
      Bindings b;
      std::vector<Experience> steps;
      try {
        b = extract_bindings(reg.get("posterior_update.whole.user"), request.user.text);
        steps = parse_experiences(b.at("Full trajectory"));
      } catch (const TemplateError&) {
        b = extract_bindings(reg.get("posterior_update.step.user"), request.user.text);
        steps = parse_experiences(b.at("Single next-state transition and reward"));
      }
      text = update(b.at(kPrior), steps);
    } else if (request.role_tag == "ids_regret" || request.role_tag == "ids_info") {
      const std::string id = request.role_tag == "ids_regret" ? "ids.bandit.regret.user" : "ids.bandit.info.user";
      const auto b = extract_bindings(reg.get(id), request.user.text);
      text = ids_scalar(request.role_tag, b.at(kPrior), b.at("Candidate action"));
    } else {
      throw PermanentBackendError(fmt::format("oracle does not implement role '{}'", request.role_tag));
    }
  } catch (const PermanentBackendError&) {
    throw;
  } catch (const Error& e) {
    throw PermanentBackendError(fmt::format("oracle could not serve {}: {}", request.role_tag, e.what()));
  }
  const auto in = static_cast<std::uint64_t>((request.system.text.size() + request.user.text.size()) / 4);
  const auto out = static_cast<std::uint64_t>(text.size() / 4);
  return {text, in, out};
}

}  // namespace psrl::llm
