#include "psrl/envs/riverswim.hpp"

#include <fmt/format.h>

#include "psrl/core/errors.hpp"
#include "psrl/llm/template.hpp"
#include "psrl/planning/value_iteration.hpp"

namespace psrl {

void RiverSwimSpec::validate() const {
  if (length < 2) throw Error("RiverSwim: length must be >= 2");
  if (horizon < 1) throw Error("RiverSwim: horizon must be >= 1");
  if (up_success < 0.0 || up_pushback < 0.0 || up_success + up_pushback > 1.0) {
    throw Error("RiverSwim: up_success + up_pushback must lie in [0, 1]");
  }
  if (small_reward < 0.0 || small_reward > 1.0 || big_reward < 0.0 || big_reward > 1.0) {
    throw Error("RiverSwim: rewards must lie in [0, 1]");
  }
}

RiverSwimSpec RiverSwimSpec::standard(std::size_t length) {
  RiverSwimSpec spec;
  spec.length = length;
  spec.horizon = length == 3 ? 6 : 20;
  return spec;
}

RiverSwimOutcome riverswim_step(const RiverSwimSpec& spec, std::size_t state, Swim action, Rng& rng) {
  if (state < 1 || state > spec.length) {
    throw Error(fmt::format("RiverSwim: state {} outside [1, {}]", state, spec.length));
  }
  RiverSwimOutcome out;
  if (action == Swim::Left) {
    out.reward = state == 1 ? spec.small_reward : 0.0;
    out.next_state = state == 1 ? 1 : state - 1;
    return out;
  }
  out.reward = state == spec.length ? spec.big_reward : 0.0;
  const double u = uniform01(rng);
  out.next_state = state;
  if (u < spec.up_success) {
    if (state < spec.length) out.next_state = state + 1;
  } else if (u < spec.up_success + spec.up_pushback) {
    if (state > 1) out.next_state = state - 1;
  }
  return out;
}

TabularMdp riverswim_mdp(const RiverSwimSpec& spec) {
  spec.validate();
  const std::size_t L = spec.length;
  TabularMdp m = TabularMdp::zeros(L, 2, spec.horizon);
  m.initial_dist[0] = 1.0;
  for (std::size_t s = 0; s < L; ++s) {
    m.p(s, 0, s == 0 ? 0 : s - 1) = 1.0;
    if (s == 0) m.r(s, 0) = spec.small_reward;

    const std::size_t up = s + 1 < L ? s + 1 : s;
    const std::size_t down = s > 0 ? s - 1 : s;
    m.p(s, 1, up) += spec.up_success;
    m.p(s, 1, down) += spec.up_pushback;
    m.p(s, 1, s) += 1.0 - spec.up_success - spec.up_pushback;
    if (s + 1 == L) m.r(s, 1) = spec.big_reward;
  }
  m.validate();
  return m;
}

std::string number_word(std::size_t n) {
  static const char* words[] = {"zero", "one", "two",   "three", "four", "five",
                                "six",  "seven", "eight", "nine",  "ten"};
  return n <= 10 ? words[n] : std::to_string(n);
}

RiverSwim::RiverSwim(RiverSwimSpec spec, Labels labels)
    : spec_(spec), labels_(std::move(labels)), mdp_(riverswim_mdp(spec_)) {
  if (labels_.left.empty() || labels_.right.empty() || labels_.left == labels_.right) {
    throw Error("RiverSwim: tunnel labels must be distinct and non-empty");
  }
  actions_ = {labels_.left, labels_.right};
  optimal_value_ = value_iteration(mdp_).initial_value(mdp_);
}

std::string RiverSwim::id() const { return fmt::format("riverswim{}", spec_.length); }

std::string RiverSwim::reset(Rng&) {
  steps_taken_ = 0;
  return state_label(0);
}

Swim RiverSwim::direction(const std::string& action) const {
  if (action == labels_.left) return Swim::Left;
  if (action == labels_.right) return Swim::Right;
  throw RejectedAction(action, fmt::format("RiverSwim: unknown tunnel '{}'", action));
}

StepOutcome RiverSwim::step(const std::string& state, const std::string& action, Rng& rng) {
  const std::size_t s = state_index(state) + 1;
  const Swim dir = direction(action);
  const RiverSwimOutcome o = riverswim_step(spec_, s, dir, rng);
  ++steps_taken_;
  return {o.reward, state_label(o.next_state - 1), false};
}

std::vector<std::string> RiverSwim::action_set(const std::string&) const { return actions_; }

std::string RiverSwim::describe() const {
  return llm::default_registry().render("riverswim.description",
                                        {{"Number of caves", number_word(spec_.length)}});
}

std::string RiverSwim::state_label(std::size_t s) const {
  if (s >= spec_.length) throw Error(fmt::format("RiverSwim: state index {} out of range", s));
  return fmt::format("Cave {}", s + 1);
}

std::size_t RiverSwim::state_index(const std::string& label) const {
  constexpr std::string_view prefix = "Cave ";
  if (label.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const unsigned long n = std::stoul(label.substr(prefix.size()), &used);
      if (used == label.size() - prefix.size() && n >= 1 && n <= spec_.length) return n - 1;
    } catch (const std::exception&) {
    }
  }
  throw Error(fmt::format("RiverSwim: unknown state '{}'", label));
}

std::string RiverSwim::action_label(std::size_t a) const {
  if (a >= 2) throw Error(fmt::format("RiverSwim: action index {} out of range", a));
  return actions_[a];
}

std::size_t RiverSwim::action_index(const std::string& label) const {
  return direction(label) == Swim::Left ? 0 : 1;
}

}  // namespace psrl
