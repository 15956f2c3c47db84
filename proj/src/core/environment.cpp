#include "psrl/core/environment.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "psrl/core/errors.hpp"

namespace psrl {

bool Environment::solved(const Trajectory& trajectory) const {
  return trajectory.total_reward() >= informed_optimal_value() - 1e-9;
}

Trajectory run_episode(Environment& env, Agent& agent, const EpisodeBudget& budget,
                       std::size_t episode_index, Rng& rng) {
  if (budget.horizon < 1) throw Error("run_episode: horizon must be >= 1");
  Trajectory trajectory;
  trajectory.episode_index = episode_index;
  agent.begin_episode(episode_index);
  std::string state = env.reset(rng);
  for (std::size_t h = 1; h <= budget.horizon; ++h) {
    std::string action = agent.select_action(state, h);
    const auto legal = env.action_set(state);
    const bool accepted = legal.empty() ? !action.empty()
                                        : std::find(legal.begin(), legal.end(), action) != legal.end();
    if (!accepted) {
      throw RejectedAction(action, fmt::format("episode {}, timestep {}: action '{}' is not in the action set",
                                               episode_index, h, action));
    }
    StepOutcome outcome = env.step(state, action, rng);
    Experience exp{state, std::move(action), outcome.reward, outcome.next_state};
    agent.observe_step(exp);
    trajectory.steps.push_back(std::move(exp));
    state = std::move(outcome.next_state);
    if (outcome.terminal) break;
  }
  agent.end_episode(trajectory);
  return trajectory;
}

double realized_regret(const Environment& env, const Trajectory& trajectory) {
  return env.informed_optimal_value() - trajectory.total_reward();
}

}  // namespace psrl
