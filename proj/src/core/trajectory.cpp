#include "psrl/core/trajectory.hpp"

#include <fmt/format.h>

#include "psrl/core/errors.hpp"

namespace psrl {

double Trajectory::total_reward() const {
  double total = 0.0;
  for (const auto& e : steps) total += e.reward;
  return total;
}

bool Trajectory::chained() const {
  for (std::size_t h = 1; h < steps.size(); ++h) {
    if (steps[h - 1].next_state != steps[h].state) return false;
  }
  return true;
}

void History::append(Trajectory trajectory) {
  if (!trajectories_.empty() && trajectory.episode_index <= trajectories_.back().episode_index) {
    throw Error(fmt::format("History: episode {} does not follow episode {}", trajectory.episode_index,
                            trajectories_.back().episode_index));
  }
  trajectories_.push_back(std::move(trajectory));
}

}  // namespace psrl
