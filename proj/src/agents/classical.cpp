#include "psrl/agents/classical.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "psrl/core/errors.hpp"
#include "psrl/envs/guess.hpp"

namespace psrl {

std::size_t argmax_random_tie(const std::vector<double>& values, Rng& rng, double tolerance) {
  if (values.empty()) throw Error("argmax of an empty vector");
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= best - tolerance) ties.push_back(i);
  return ties.size() == 1 ? ties[0] : ties[uniform_index(rng, ties.size())];
}

std::string RandomAgent::select_action(const std::string& state, std::size_t) {
  const auto legal = actions_(state);
  if (legal.empty()) throw Error("random agent needs a finite action set");
  return legal[uniform_index(rng_, legal.size())];
}

std::size_t ts_bandit_select(const BetaBelief& belief, Rng& rng) {
  return argmax_random_tie(beta_sample(belief, rng), rng);
}

ThompsonBanditAgent::ThompsonBanditAgent(std::vector<std::string> labels, Rng rng, BetaBelief prior)
    : labels_(std::move(labels)), rng_(rng), belief_(std::move(prior)) {
  if (belief_.arms() == 0) belief_ = BetaBelief::uniform(labels_.size());
  if (belief_.arms() != labels_.size()) throw Error("thompson: prior size differs from the label count");
}

std::string ThompsonBanditAgent::select_action(const std::string&, std::size_t) {
  return labels_[ts_bandit_select(belief_, rng_)];
}

void ThompsonBanditAgent::end_episode(const Trajectory& trajectory) {
  for (const auto& e : trajectory.steps) {
    const auto it = std::find(labels_.begin(), labels_.end(), e.action);
    if (it == labels_.end()) throw Error(fmt::format("thompson: unknown arm '{}'", e.action));
    belief_ = beta_update(belief_, static_cast<std::size_t>(it - labels_.begin()), e.reward);
  }
}

VanillaPsrlAgent::VanillaPsrlAgent(const TabularEnvironment& env, VanillaPsrlConfig config, Rng rng)
    : env_(env), rng_(rng) {
  const auto& m = env.true_mdp();
  const double a0 = config.alpha0.value_or(1.0 / static_cast<double>(m.num_states));
  trans_ = DirichletBelief::uniform(m.num_states, m.num_actions, a0);
  rew_ = RewardBelief::uniform(m.num_states, m.num_actions, config.reward_support);
}

void VanillaPsrlAgent::begin_episode(std::size_t) {
  const auto& truth = env_.true_mdp();
  const TabularMdp sampled =
      point_mass_ ? *point_mass_ : psrl_sample_mdp(trans_, rew_, truth.initial_dist, truth.horizon, rng_);
  policy_ = greedy_policy(value_iteration(sampled), rng_);
}

std::string VanillaPsrlAgent::select_action(const std::string& state, std::size_t timestep) {
  if (timestep < 1 || timestep > policy_.horizon) throw Error(fmt::format("vanilla psrl: timestep {} out of range", timestep));
  return env_.action_label(policy_.at(timestep - 1, env_.state_index(state)));
}

void VanillaPsrlAgent::end_episode(const Trajectory& trajectory) {
  if (point_mass_) return;
  for (const auto& e : trajectory.steps) {
    const std::size_t s = env_.state_index(e.state);
    const std::size_t a = env_.action_index(e.action);
    trans_ = dirichlet_update(trans_, s, a, env_.state_index(e.next_state));
    rew_ = reward_update(rew_, s, a, e.reward);
  }
}

BayesLockAgent::BayesLockAgent(std::size_t total_episodes, std::shared_ptr<LockPlanner> planner)
    : total_episodes_(total_episodes), planner_(std::move(planner)), belief_(LockBelief::uniform(planner_->game())) {}

void BayesLockAgent::begin_episode(std::size_t) { ++begun_; }

std::string BayesLockAgent::select_action(const std::string& state, std::size_t) {
  if (begun_ > total_episodes_) throw Error("bayes lock agent: more episodes than planned");
  std::string prefix;
  for (const auto& e : parse_guess_state(lock_vocabulary(), state)) prefix += e.symbol;
  const std::size_t episodes_left = total_episodes_ - begun_ + 1;
  return std::string(1, planner_->decide(belief_, prefix, episodes_left).digit);
}

void BayesLockAgent::observe_step(const Experience& step) {
  const auto entries = parse_guess_state(lock_vocabulary(), step.next_state);
  if (entries.empty()) return;
  belief_.refine(entries.size() - 1, entries.back().symbol, entries.back().feedback);
}

}  // namespace psrl
