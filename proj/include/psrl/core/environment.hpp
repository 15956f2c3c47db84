#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psrl/core/rng.hpp"
#include "psrl/core/trajectory.hpp"
#include "psrl/core/types.hpp"

namespace psrl {

struct StepOutcome {
  double reward = 0.0;
  std::string next_state;
  bool terminal = false;
};

// A text-labelled episodic environment. Instances are single-trial and
// single-threaded; they may carry per-episode progress between reset() and
// the terminal step.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual std::string reset(Rng& rng) = 0;
  virtual StepOutcome step(const std::string& state, const std::string& action, Rng& rng) = 0;
  // Ordered legal actions. An empty list means free-form text is accepted.
  virtual std::vector<std::string> action_set(const std::string& state) const = 0;
  virtual std::string describe() const = 0;
  // V*_{M,1} of the realized instance.
  virtual double informed_optimal_value() const = 0;

  // Per-episode regret computed from true parameters, where available
  // (bandits report mu* - mu(chosen)).
  virtual std::optional<double> expected_regret(const Trajectory&) const { return std::nullopt; }
  // Label of the optimal action for single-step environments.
  virtual std::optional<std::string> optimal_action() const { return std::nullopt; }
  virtual bool solved(const Trajectory& trajectory) const;
};

// Agents own all learning state.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string name() const = 0;
  virtual void begin_episode(std::size_t episode_index) = 0;
  virtual std::string select_action(const std::string& state, std::size_t timestep) = 0;
  // Called after every environment step, before the next select_action.
  virtual void observe_step(const Experience&) {}
  virtual void end_episode(const Trajectory& trajectory) = 0;
};

// Runs one episode of at most budget.horizon steps. Throws RejectedAction
// naming episode, timestep and label when the agent's action is illegal.
Trajectory run_episode(Environment& env, Agent& agent, const EpisodeBudget& budget,
                       std::size_t episode_index, Rng& rng);

// informed_optimal_value() minus the realized return; negative on lucky draws.
double realized_regret(const Environment& env, const Trajectory& trajectory);

}  // namespace psrl
