#pragma once

#include <optional>
#include <vector>

#include "psrl/core/mdp.hpp"
#include "psrl/core/rng.hpp"

namespace psrl {

// Independent Beta posteriors over Bernoulli arm means.
struct BetaBelief {
  std::vector<double> alpha;
  std::vector<double> beta;

  static BetaBelief uniform(std::size_t arms, double a0 = 1.0, double b0 = 1.0);
  std::size_t arms() const { return alpha.size(); }
  void validate() const;
};

// reward must be exactly 0 or 1.
BetaBelief beta_update(BetaBelief belief, std::size_t arm, double reward);
std::vector<double> beta_sample(const BetaBelief& belief, Rng& rng);

// One Dirichlet per (state, action) over next states.
struct DirichletBelief {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> concentration;  // [(s * A + a) * S + s']

  static DirichletBelief uniform(std::size_t states, std::size_t actions, double alpha0);
  double at(std::size_t s, std::size_t a, std::size_t next) const {
    return concentration[(s * num_actions + a) * num_states + next];
  }
  std::vector<double> row(std::size_t s, std::size_t a) const;
  void validate() const;
};

DirichletBelief dirichlet_update(DirichletBelief belief, std::size_t s, std::size_t a, std::size_t next);

// Discrete prior over a finite reward support per (state, action). Rewards
// are deterministic, so one observation collapses a pair to a point mass.
struct RewardBelief {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> support;
  std::vector<double> mass;                   // [(s * A + a) * |support| + i]
  std::vector<std::optional<double>> observed;  // [s * A + a]

  // Uniform over `support`; {0, 0.005, 1} by default.
  static RewardBelief uniform(std::size_t states, std::size_t actions, std::vector<double> support = {0.0, 0.005, 1.0});
  void validate() const;
};

// Throws MisspecificationError naming (s, a, value) if the value is not in
// the support or contradicts an earlier observation.
RewardBelief reward_update(RewardBelief belief, std::size_t s, std::size_t a, double observed_reward);

TabularMdp psrl_sample_mdp(const DirichletBelief& trans, const RewardBelief& rew, const std::vector<double>& initial_dist,
                           std::size_t horizon, Rng& rng);

}  // namespace psrl
