#include "psrl/core/mdp.hpp"

#include <cmath>
#include <fmt/format.h>

#include "psrl/core/errors.hpp"

namespace psrl {

TabularMdp TabularMdp::zeros(std::size_t states, std::size_t actions, std::size_t horizon) {
  TabularMdp m;
  m.num_states = states;
  m.num_actions = actions;
  m.horizon = horizon;
  m.transition.assign(states * actions * states, 0.0);
  m.reward.assign(states * actions, 0.0);
  m.initial_dist.assign(states, 0.0);
  return m;
}

void TabularMdp::validate() const {
  constexpr double kTol = 1e-9;
  if (num_states == 0 || num_actions == 0) throw Error("TabularMdp: empty state or action set");
  if (horizon == 0) throw Error("TabularMdp: horizon must be >= 1");
  if (transition.size() != num_states * num_actions * num_states ||
      reward.size() != num_states * num_actions || initial_dist.size() != num_states) {
    throw Error("TabularMdp: tensor sizes do not match state/action counts");
  }
  for (std::size_t s = 0; s < num_states; ++s) {
    for (std::size_t a = 0; a < num_actions; ++a) {
      double sum = 0.0;
      for (std::size_t n = 0; n < num_states; ++n) {
        const double q = p(s, a, n);
        if (!(q >= 0.0)) throw Error(fmt::format("TabularMdp: negative transition at ({},{},{})", s, a, n));
        sum += q;
      }
      if (std::abs(sum - 1.0) > kTol) {
        throw Error(fmt::format("TabularMdp: transition row ({},{}) sums to {}", s, a, sum));
      }
      const double rew = r(s, a);
      if (!(rew >= 0.0 && rew <= 1.0)) {
        throw Error(fmt::format("TabularMdp: reward ({},{}) = {} outside [0,1]", s, a, rew));
      }
    }
  }
  double total = 0.0;
  for (double q : initial_dist) {
    if (!(q >= 0.0)) throw Error("TabularMdp: negative initial probability");
    total += q;
  }
  if (std::abs(total - 1.0) > kTol) throw Error(fmt::format("TabularMdp: initial_dist sums to {}", total));
}

}  // namespace psrl
