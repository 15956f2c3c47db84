#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psrl/bayes/beliefs.hpp"
#include "psrl/core/environment.hpp"
#include "psrl/envs/tabular.hpp"
#include "psrl/planning/lock_planner.hpp"
#include "psrl/planning/value_iteration.hpp"

namespace psrl {

using ActionSetFn = std::function<std::vector<std::string>(const std::string& state)>;

// Index of the largest entry, ties drawn uniformly.
std::size_t argmax_random_tie(const std::vector<double>& values, Rng& rng, double tolerance = 0.0);

class RandomAgent : public Agent {
 public:
  RandomAgent(ActionSetFn actions, Rng rng) : actions_(std::move(actions)), rng_(rng) {}
  std::string name() const override { return "random"; }
  void begin_episode(std::size_t) override {}
  std::string select_action(const std::string& state, std::size_t timestep) override;
  void end_episode(const Trajectory&) override {}

 private:
  ActionSetFn actions_;
  Rng rng_;
};

// Draws one mean per arm and returns the argmax.
std::size_t ts_bandit_select(const BetaBelief& belief, Rng& rng);

// Beta-Bernoulli Thompson sampling over labelled arms.
class ThompsonBanditAgent : public Agent {
 public:
  ThompsonBanditAgent(std::vector<std::string> labels, Rng rng, BetaBelief prior = {});
  std::string name() const override { return "thompson"; }
  void begin_episode(std::size_t) override {}
  std::string select_action(const std::string& state, std::size_t timestep) override;
  void end_episode(const Trajectory& trajectory) override;
  const BetaBelief& belief() const { return belief_; }

 private:
  std::vector<std::string> labels_;
  Rng rng_;
  BetaBelief belief_;
};

struct VanillaPsrlConfig {
  std::optional<double> alpha0;  // 1 / |S| when unset
  std::vector<double> reward_support{0.0, 0.005, 1.0};
};

// Tabular PSRL: sample an MDP from the posterior at each episode start, plan
// by value iteration and follow the greedy policy; update from the whole
// trajectory at episode end.
class VanillaPsrlAgent : public Agent {
 public:
  VanillaPsrlAgent(const TabularEnvironment& env, VanillaPsrlConfig config, Rng rng);
  std::string name() const override { return "vanilla_psrl"; }
  void begin_episode(std::size_t episode_index) override;
  std::string select_action(const std::string& state, std::size_t timestep) override;
  void end_episode(const Trajectory& trajectory) override;

  // Replaces posterior sampling with a fixed model and disables learning.
  void set_point_mass(TabularMdp mdp) { point_mass_ = std::move(mdp); }
  const NonStationaryPolicy& policy() const { return policy_; }
  const DirichletBelief& transitions() const { return trans_; }
  const RewardBelief& rewards() const { return rew_; }

 private:
  const TabularEnvironment& env_;
  Rng rng_;
  DirichletBelief trans_;
  RewardBelief rew_;
  std::optional<TabularMdp> point_mass_;
  NonStationaryPolicy policy_;
};

// The exact Bayes-optimal combination-lock agent over a known episode count.
class BayesLockAgent : public Agent {
 public:
  BayesLockAgent(std::size_t total_episodes, std::shared_ptr<LockPlanner> planner);
  std::string name() const override { return "bayes_lock"; }
  void begin_episode(std::size_t episode_index) override;
  std::string select_action(const std::string& state, std::size_t timestep) override;
  void observe_step(const Experience& step) override;
  void end_episode(const Trajectory&) override {}
  const LockBelief& belief() const { return belief_; }

 private:
  std::size_t total_episodes_;
  std::size_t begun_ = 0;
  std::shared_ptr<LockPlanner> planner_;
  LockBelief belief_;
};

}  // namespace psrl
