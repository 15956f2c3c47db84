#pragma once

#include <vector>

#include "psrl/core/mdp.hpp"
#include "psrl/core/rng.hpp"

namespace psrl {

// q[h][s][a] and v[h][s] for h = 0..H-1 (timestep h+1), flattened.
struct ValueTable {
  std::size_t horizon = 0;
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> q;
  std::vector<double> v;

  double q_at(std::size_t h, std::size_t s, std::size_t a) const {
    return q[(h * num_states + s) * num_actions + a];
  }
  double v_at(std::size_t h, std::size_t s) const { return v[h * num_states + s]; }
  // Expected value of the initial distribution at the first timestep.
  double initial_value(const TabularMdp& mdp) const;
};

// Backward induction, h = H..1, with v[H+1] = 0. The sum over next states
// runs innermost in ascending index order so results are reproducible
// bit-for-bit across ports.
ValueTable value_iteration(const TabularMdp& mdp);

struct TieEvent {
  std::size_t timestep = 0;
  std::size_t state = 0;
  std::vector<std::size_t> tied_actions;
  std::size_t chosen = 0;
};

struct NonStationaryPolicy {
  std::size_t horizon = 0;
  std::size_t num_states = 0;
  std::vector<std::size_t> action;  // [h * num_states + s]
  std::vector<TieEvent> tie_breaks;

  std::size_t at(std::size_t h, std::size_t s) const { return action[h * num_states + s]; }
};

// Greedy argmax per (h, s). Actions within `tie_tolerance` of the maximum
// count as tied and one is drawn uniformly from rng.
NonStationaryPolicy greedy_policy(const ValueTable& table, Rng& rng, double tie_tolerance = 1e-12);

// Expected return of `policy` from the initial distribution of `mdp`.
double policy_value(const TabularMdp& mdp, const NonStationaryPolicy& policy);

}  // namespace psrl
