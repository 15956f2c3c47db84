#include "psrl/bayes/beliefs.hpp"

#include <cmath>

#include <fmt/format.h>

#include "psrl/bayes/distributions.hpp"
#include "psrl/core/errors.hpp"

namespace psrl {
namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

BetaBelief BetaBelief::uniform(std::size_t arms, double a0, double b0) {
  BetaBelief b{std::vector<double>(arms, a0), std::vector<double>(arms, b0)};
  b.validate();
  return b;
}

void BetaBelief::validate() const {
  if (alpha.size() != beta.size() || alpha.empty()) throw Error("BetaBelief: parameter vectors must match and be non-empty");
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!positive_finite(alpha[i]) || !positive_finite(beta[i])) {
      throw Error(fmt::format("BetaBelief: arm {} has non-positive parameters", i));
    }
  }
}

BetaBelief beta_update(BetaBelief belief, std::size_t arm, double reward) {
  if (arm >= belief.arms()) throw Error(fmt::format("beta_update: arm {} out of range", arm));
  if (reward == 1.0) {
    belief.alpha[arm] += 1.0;
  } else if (reward == 0.0) {
    belief.beta[arm] += 1.0;
  } else {
    throw Error(fmt::format("beta_update: reward {} is not binary", reward));
  }
  return belief;
}

std::vector<double> beta_sample(const BetaBelief& belief, Rng& rng) {
  std::vector<double> out(belief.arms());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sample_beta(rng, belief.alpha[i], belief.beta[i]);
  return out;
}

DirichletBelief DirichletBelief::uniform(std::size_t states, std::size_t actions, double alpha0) {
  DirichletBelief b{states, actions, std::vector<double>(states * actions * states, alpha0)};
  b.validate();
  return b;
}

std::vector<double> DirichletBelief::row(std::size_t s, std::size_t a) const {
  const auto begin = concentration.begin() + static_cast<std::ptrdiff_t>((s * num_actions + a) * num_states);
  return {begin, begin + static_cast<std::ptrdiff_t>(num_states)};
}

void DirichletBelief::validate() const {
  if (num_states == 0 || num_actions == 0 || concentration.size() != num_states * num_actions * num_states) {
    throw Error("DirichletBelief: shape mismatch");
  }
  for (double c : concentration) {
    if (!positive_finite(c)) throw Error("DirichletBelief: concentrations must be positive");
  }
}

DirichletBelief dirichlet_update(DirichletBelief belief, std::size_t s, std::size_t a, std::size_t next) {
  if (s >= belief.num_states || a >= belief.num_actions || next >= belief.num_states) {
    throw Error(fmt::format("dirichlet_update: index ({}, {}, {}) out of range", s, a, next));
  }
  belief.concentration[(s * belief.num_actions + a) * belief.num_states + next] += 1.0;
  return belief;
}

RewardBelief RewardBelief::uniform(std::size_t states, std::size_t actions, std::vector<double> support) {
  RewardBelief b;
  b.num_states = states;
  b.num_actions = actions;
  b.support = std::move(support);
  if (b.support.empty()) throw Error("RewardBelief: empty support");
  b.mass.assign(states * actions * b.support.size(), 1.0 / static_cast<double>(b.support.size()));
  b.observed.assign(states * actions, std::nullopt);
  b.validate();
  return b;
}

void RewardBelief::validate() const {
  const std::size_t n = support.size();
  if (n == 0 || mass.size() != num_states * num_actions * n || observed.size() != num_states * num_actions) {
    throw Error("RewardBelief: shape mismatch");
  }
  for (std::size_t p = 0; p < num_states * num_actions; ++p) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mass[p * n + i] < 0.0) throw Error("RewardBelief: negative mass");
      total += mass[p * n + i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error("RewardBelief: mass does not sum to 1");
  }
}

RewardBelief reward_update(RewardBelief belief, std::size_t s, std::size_t a, double observed_reward) {
  if (s >= belief.num_states || a >= belief.num_actions) {
    throw Error(fmt::format("reward_update: index ({}, {}) out of range", s, a));
  }
  const std::size_t n = belief.support.size();
  std::size_t hit = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (belief.support[i] == observed_reward) hit = i;
  }
  const std::size_t pair = s * belief.num_actions + a;
  if (hit == n) {
    throw MisspecificationError(
        fmt::format("reward {} observed at (state {}, action {}) lies outside the prior support", observed_reward, s, a));
  }
  if (belief.observed[pair] && *belief.observed[pair] != observed_reward) {
    throw MisspecificationError(fmt::format("reward {} observed at (state {}, action {}) contradicts earlier reward {}",
                                            observed_reward, s, a, *belief.observed[pair]));
  }
  for (std::size_t i = 0; i < n; ++i) belief.mass[pair * n + i] = i == hit ? 1.0 : 0.0;
  belief.observed[pair] = observed_reward;
  return belief;
}

TabularMdp psrl_sample_mdp(const DirichletBelief& trans, const RewardBelief& rew, const std::vector<double>& initial_dist,
                           std::size_t horizon, Rng& rng) {
  if (trans.num_states != rew.num_states || trans.num_actions != rew.num_actions) {
    throw Error("psrl_sample_mdp: transition and reward beliefs disagree on shape");
  }
  const std::size_t S = trans.num_states;
  const std::size_t A = trans.num_actions;
  const std::size_t n = rew.support.size();
  TabularMdp m = TabularMdp::zeros(S, A, horizon);
  m.initial_dist = initial_dist;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const auto row = sample_dirichlet(rng, trans.row(s, a));
      for (std::size_t next = 0; next < S; ++next) m.p(s, a, next) = row[next];
      const std::size_t pair = s * A + a;
      if (rew.observed[pair]) {
        m.r(s, a) = *rew.observed[pair];
        continue;
      }
      double u = uniform01(rng);
      std::size_t pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = rew.mass[pair * n + i];
        if (u < w) {
          pick = i;
          break;
        }
        u -= w;
      }
      m.r(s, a) = rew.support[pick];
    }
  }
  return m;
}

}  // namespace psrl
