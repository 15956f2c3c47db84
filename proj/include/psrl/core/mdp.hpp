#pragma once

#include <cstddef>
#include <vector>

namespace psrl {

// Finite-horizon tabular MDP. Transition and reward tensors are stored
// row-major: transition[(s * A + a) * S + s'], reward[s * A + a].
struct TabularMdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> transition;
  std::vector<double> reward;
  std::vector<double> initial_dist;
  std::size_t horizon = 1;

  static TabularMdp zeros(std::size_t states, std::size_t actions, std::size_t horizon);

  double p(std::size_t s, std::size_t a, std::size_t next) const {
    return transition[(s * num_actions + a) * num_states + next];
  }
  double& p(std::size_t s, std::size_t a, std::size_t next) {
    return transition[(s * num_actions + a) * num_states + next];
  }
  double r(std::size_t s, std::size_t a) const { return reward[s * num_actions + a]; }
  double& r(std::size_t s, std::size_t a) { return reward[s * num_actions + a]; }

  // Throws psrl::Error naming the first violated invariant.
  void validate() const;
};

}  // namespace psrl
