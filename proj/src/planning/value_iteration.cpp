#include "psrl/planning/value_iteration.hpp"

#include <algorithm>

#include "psrl/core/errors.hpp"

namespace psrl {

double ValueTable::initial_value(const TabularMdp& mdp) const {
  double total = 0.0;
  for (std::size_t s = 0; s < num_states; ++s) total += mdp.initial_dist[s] * v_at(0, s);
  return total;
}

ValueTable value_iteration(const TabularMdp& mdp) {
  const std::size_t S = mdp.num_states;
  const std::size_t A = mdp.num_actions;
  const std::size_t H = mdp.horizon;
  ValueTable table;
  table.horizon = H;
  table.num_states = S;
  table.num_actions = A;
  table.q.assign(H * S * A, 0.0);
  table.v.assign(H * S, 0.0);

  std::vector<double> next_v(S, 0.0);
  for (std::size_t step = H; step-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double best = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        double future = 0.0;
        for (std::size_t n = 0; n < S; ++n) future += mdp.p(s, a, n) * next_v[n];
        const double q = mdp.r(s, a) + future;
        table.q[(step * S + s) * A + a] = q;
        if (a == 0 || q > best) best = q;
      }
      table.v[step * S + s] = best;
    }
    std::copy_n(table.v.begin() + static_cast<std::ptrdiff_t>(step * S), S, next_v.begin());
  }
  return table;
}

NonStationaryPolicy greedy_policy(const ValueTable& table, Rng& rng, double tie_tolerance) {
  NonStationaryPolicy policy;
  policy.horizon = table.horizon;
  policy.num_states = table.num_states;
  policy.action.assign(table.horizon * table.num_states, 0);
  std::vector<std::size_t> tied;
  for (std::size_t h = 0; h < table.horizon; ++h) {
    for (std::size_t s = 0; s < table.num_states; ++s) {
      const double best = table.v_at(h, s);
      tied.clear();
      for (std::size_t a = 0; a < table.num_actions; ++a) {
        if (table.q_at(h, s, a) >= best - tie_tolerance) tied.push_back(a);
      }
      std::size_t chosen = tied.front();
      if (tied.size() > 1) {
        chosen = tied[uniform_index(rng, tied.size())];
        policy.tie_breaks.push_back({h + 1, s, tied, chosen});
      }
      policy.action[h * table.num_states + s] = chosen;
    }
  }
  return policy;
}

double policy_value(const TabularMdp& mdp, const NonStationaryPolicy& policy) {
  const std::size_t S = mdp.num_states;
  if (policy.num_states != S || policy.horizon != mdp.horizon) throw Error("policy_value: policy shape differs from the MDP");
  std::vector<double> next(S, 0.0), cur(S, 0.0);
  for (std::size_t h = mdp.horizon; h-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      const std::size_t a = policy.at(h, s);
      double v = mdp.r(s, a);
      for (std::size_t n = 0; n < S; ++n) v += mdp.p(s, a, n) * next[n];
      cur[s] = v;
    }
    std::swap(cur, next);
  }
  double total = 0.0;
  for (std::size_t s = 0; s < S; ++s) total += mdp.initial_dist[s] * next[s];
  return total;
}

}  // namespace psrl
