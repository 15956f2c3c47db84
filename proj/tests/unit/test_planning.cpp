#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "psrl/core/errors.hpp"
#include "psrl/envs/guess.hpp"
#include "psrl/envs/riverswim.hpp"
#include "psrl/planning/lock_planner.hpp"
#include "psrl/planning/value_iteration.hpp"

using namespace psrl;

namespace {

// Exhaustive expectimax over the history tree of RiverSwim: every node takes
// the better of both actions, every chance node enumerates next states.
double history_expectimax(const RiverSwimSpec& spec, std::size_t state, std::size_t steps_left) {
  if (steps_left == 0) return 0.0;
  const std::size_t n = spec.length;
  const double left = (state == 1 ? spec.small_reward : 0.0) +
                      history_expectimax(spec, std::max<std::size_t>(state - 1, 1), steps_left - 1);
  std::map<std::size_t, double> next;
  next[std::min(state + 1, n)] += spec.up_success;
  next[std::max<std::size_t>(state - 1, 1)] += spec.up_pushback;
  next[state] += 1.0 - spec.up_success - spec.up_pushback;
  double right = state == n ? spec.big_reward : 0.0;
  for (auto [s, p] : next) right += p * history_expectimax(spec, s, steps_left - 1);
  return std::max(left, right);
}

// Best fixed action sequence chosen without state feedback.
double best_open_loop(const TabularMdp& m) {
  double best = 0.0;
  for (std::size_t seq = 0; seq < (1u << m.horizon); ++seq) {
    std::vector<double> dist = m.initial_dist;
    double total = 0.0;
    for (std::size_t h = 0; h < m.horizon; ++h) {
      const std::size_t a = (seq >> h) & 1u;
      std::vector<double> next(m.num_states, 0.0);
      for (std::size_t s = 0; s < m.num_states; ++s) {
        total += dist[s] * m.r(s, a);
        for (std::size_t x = 0; x < m.num_states; ++x) next[x] += dist[s] * m.p(s, a, x);
      }
      dist = next;
    }
    best = std::max(best, total);
  }
  return best;
}

TabularMdp random_mdp(Rng& rng, std::size_t S, std::size_t A, std::size_t H) {
  TabularMdp m = TabularMdp::zeros(S, A, H);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a) {
      double z = 0.0;
      for (std::size_t x = 0; x < S; ++x) z += (m.p(s, a, x) = uniform01(rng) + 1e-3);
      for (std::size_t x = 0; x < S; ++x) m.p(s, a, x) /= z;
      m.r(s, a) = uniform01(rng);
    }
  m.initial_dist.assign(S, 1.0 / S);
  return m;
}

// Plain expectimax over lock histories without any pruning. `codes` holds the
// codes consistent with the history so far; returns expected solved episodes
// times |codes|.
struct LockOracle {
  std::size_t length;
  std::size_t alphabet;
  std::map<std::tuple<std::vector<std::string>, std::size_t, std::size_t, bool>, std::uint64_t> memo;

  std::uint64_t value(const std::vector<std::string>& codes, std::size_t pos, std::size_t episodes, bool alive) {
    if (codes.empty() || episodes == 0) return 0;
    auto key = std::make_tuple(codes, pos, episodes, alive);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::uint64_t best = 0;
    for (std::size_t d = 0; d < alphabet; ++d) best = std::max(best, q(codes, pos, episodes, alive, char('0' + d)));
    memo[key] = best;
    return best;
  }

  std::uint64_t q(const std::vector<std::string>& codes, std::size_t pos, std::size_t episodes, bool alive, char digit) {
    std::map<Feedback, std::vector<std::string>> parts;
    for (const auto& c : codes) parts[classify(c, pos, digit)].push_back(c);
    std::uint64_t total = 0;
    for (auto& [fb, sub] : parts) {
      const bool still = alive && fb == Feedback::CorrectPosition;
      if (pos + 1 == length) {
        total += (still ? sub.size() : 0) + value(sub, 0, episodes - 1, true);
      } else {
        total += value(sub, pos + 1, episodes, still);
      }
    }
    return total;
  }
};

// Plays the planner against `code` with per-digit feedback; returns the
// 1-based episode that solved it, or 0.
std::size_t play_lock(LockPlanner& planner, const std::string& code, std::size_t episodes) {
  LockBelief belief = LockBelief::uniform(planner.game());
  for (std::size_t k = 0; k < episodes; ++k) {
    std::string guess;
    for (std::size_t pos = 0; pos < code.size(); ++pos) {
      const char d = lock_bayes_optimal_action(planner, belief, guess, pos + 1, episodes - k, code.size() - pos);
      const Feedback fb = classify(code, pos, d);
      CHECK(std::any_of(belief.consistent_codes.begin(), belief.consistent_codes.end(),
                        [&](const std::string& c) { return c.find(d) != std::string::npos; }));
      belief.refine(pos, d, fb);
      REQUIRE_FALSE(belief.empty());
      guess += d;
    }
    if (guess == code) return k + 1;
  }
  return 0;
}

}  // namespace

TEST_CASE("value_iteration base case and zero rewards") {
  Rng rng(1);
  TabularMdp m = random_mdp(rng, 4, 3, 1);
  ValueTable t = value_iteration(m);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t a = 0; a < 3; ++a) CHECK(t.q_at(0, s, a) == m.r(s, a));
  TabularMdp z = random_mdp(rng, 4, 3, 5);
  std::fill(z.reward.begin(), z.reward.end(), 0.0);
  ValueTable tz = value_iteration(z);
  for (double v : tz.v) CHECK(v == 0.0);
  for (double q : tz.q) CHECK(q == 0.0);
}

TEST_CASE("value_iteration on RiverSwim-3 equals exhaustive history expectimax") {
  const RiverSwimSpec spec = RiverSwimSpec::standard(3);
  TabularMdp m = riverswim_mdp(spec);
  ValueTable t = value_iteration(m);
  const double oracle = history_expectimax(spec, 1, 6);
  CHECK(std::abs(t.v_at(0, 0) - oracle) <= 1e-9);
  CHECK(std::abs(t.initial_value(m) - oracle) <= 1e-9);
  CHECK(std::abs(oracle - 1.3131787015625) <= 1e-12);
  // Conditioning on the state is worth something here.
  CHECK(best_open_loop(m) < oracle - 1e-4);
}

TEST_CASE("value_iteration satisfies v = max q and nonnegativity") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    TabularMdp m = random_mdp(rng, 5, 3, 7);
    ValueTable t = value_iteration(m);
    for (std::size_t h = 0; h < 7; ++h)
      for (std::size_t s = 0; s < 5; ++s) {
        double best = -1;
        for (std::size_t a = 0; a < 3; ++a) {
          CHECK(t.q_at(h, s, a) >= 0.0);
          best = std::max(best, t.q_at(h, s, a));
        }
        CHECK(t.v_at(h, s) == best);
      }
  }
}

TEST_CASE("value_iteration is monotone in rewards") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    TabularMdp m = random_mdp(rng, 4, 2, 6);
    TabularMdp bigger = m;
    for (double& r : bigger.reward) r = std::min(1.0, r + 0.5 * uniform01(rng));
    ValueTable a = value_iteration(m);
    ValueTable b = value_iteration(bigger);
    for (std::size_t i = 0; i < a.q.size(); ++i) CHECK(b.q[i] >= a.q[i]);
  }
}

TEST_CASE("greedy_policy argmax set is invariant to positive affine reward scaling") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    TabularMdp m = random_mdp(rng, 4, 3, 5);
    TabularMdp scaled = m;
    for (double& r : scaled.reward) r = 0.5 * r + 0.25;
    Rng r1(7), r2(7);
    NonStationaryPolicy p1 = greedy_policy(value_iteration(m), r1);
    NonStationaryPolicy p2 = greedy_policy(value_iteration(scaled), r2);
    CHECK(p1.action == p2.action);
  }
}

TEST_CASE("greedy_policy picks a dominant action everywhere") {
  TabularMdp m = TabularMdp::zeros(2, 2, 4);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a = 0; a < 2; ++a) {
      m.p(s, a, s) = 1.0;
      m.r(s, a) = a == 1 ? 0.7 : 0.2;
    }
  m.initial_dist = {1.0, 0.0};
  Rng rng(1);
  NonStationaryPolicy p = greedy_policy(value_iteration(m), rng);
  for (std::size_t a : p.action) CHECK(a == 1);
  CHECK(p.tie_breaks.empty());
}

TEST_CASE("greedy_policy breaks exact ties uniformly") {
  TabularMdp m = TabularMdp::zeros(1, 2, 1);
  m.p(0, 0, 0) = m.p(0, 1, 0) = 1.0;
  m.r(0, 0) = m.r(0, 1) = 0.5;
  m.initial_dist = {1.0};
  ValueTable t = value_iteration(m);
  Rng rng(99);
  int ones = 0;
  for (int i = 0; i < 1000; ++i) {
    NonStationaryPolicy p = greedy_policy(t, rng);
    REQUIRE(p.tie_breaks.size() == 1);
    CHECK(p.tie_breaks[0].timestep == 1);
    CHECK(p.tie_breaks[0].tied_actions == std::vector<std::size_t>{0, 1});
    CHECK(p.tie_breaks[0].chosen == p.at(0, 0));
    ones += p.at(0, 0) == 1;
  }
  CHECK(std::abs(ones / 1000.0 - 0.5) <= 0.05);
}

TEST_CASE("greedy policy on the true RiverSwim-3 swims right from states 1 and 2 early on") {
  TabularMdp m = riverswim_mdp(RiverSwimSpec::standard(3));
  Rng rng(0);
  NonStationaryPolicy p = greedy_policy(value_iteration(m), rng);
  for (std::size_t h = 0; h < 4; ++h) {
    CHECK(p.at(h, 0) == 1);
    CHECK(p.at(h, 1) == 1);
  }
}

TEST_CASE("LockBelief refine keeps exactly the consistent codes") {
  LockGame game;
  LockBelief b = LockBelief::uniform(game);
  CHECK(b.consistent_codes.size() == 720);
  b.refine(0, '3', Feedback::CorrectPosition);
  CHECK(b.consistent_codes.size() == 72);
  b.refine(1, '4', Feedback::WrongPosition);
  for (const auto& c : b.consistent_codes) {
    CHECK(c[0] == '3');
    CHECK(c[2] == '4');
  }
  CHECK(b.consistent_codes.size() == 8);
}

TEST_CASE("lock planner emits the known code when certain") {
  LockPlanner planner;
  LockBelief b{{"582"}};
  CHECK(lock_bayes_optimal_action(planner, b, "", 1, 3, 3) == '5');
  CHECK(lock_bayes_optimal_action(planner, b, "5", 2, 3, 2) == '8');
  CHECK(lock_bayes_optimal_action(planner, b, "58", 3, 3, 1) == '2');
  LockDecision d = planner.decide(b, "", 3);
  CHECK(d.successes == 3);
  CHECK(d.value() == 3.0);
  CHECK_THROWS(lock_bayes_optimal_action(planner, b, "5", 1, 3, 3));
}

TEST_CASE("lock planner root value equals exhaustive expectimax on the 2-digit / 4-symbol instance") {
  LockGame game{2, 4};
  for (std::size_t k = 1; k <= 3; ++k) {
    LockPlanner planner(game);
    LockOracle oracle{2, 4, {}};
    const auto codes = game.all_codes();
    REQUIRE(codes.size() == 12);
    LockDecision d = planner.decide(LockBelief::uniform(game), "", k);
    CHECK(d.belief_size == 12);
    CHECK(d.successes == oracle.value(codes, 0, k, true));
    // The chosen digit attains the optimum.
    CHECK(oracle.q(codes, 0, k, true, d.digit) == d.successes);
  }
}

TEST_CASE("lock planner matches unpruned expectimax on mid-size instances and interior beliefs") {
  for (auto [len, alpha, k] : {std::tuple{3u, 5u, 2u}, std::tuple{3u, 5u, 3u}, std::tuple{3u, 6u, 2u}}) {
    LockGame game{len, alpha};
    LockPlanner planner(game);
    LockOracle oracle{len, alpha, {}};
    const auto codes = game.all_codes();
    CHECK(planner.decide(LockBelief::uniform(game), "", k).successes == oracle.value(codes, 0, k, true));
    // An interior belief after a partial episode.
    LockBelief b = LockBelief::uniform(game);
    b.refine(0, '1', Feedback::WrongPosition);
    LockDecision d = planner.decide(b, "1", k);
    CHECK(d.successes == oracle.value(b.consistent_codes, 1, k, false));
    CHECK(oracle.q(b.consistent_codes, 1, k, false, d.digit) == d.successes);
  }
}

TEST_CASE("lock planner on 720 codes: sample of codes solved within 8 episodes") {
  LockPlanner planner;
  const auto& codes = all_lock_codes();
  for (std::size_t i = 0; i < codes.size(); i += 37) {
    const std::size_t solved_at = play_lock(planner, codes[i], 8);
    CHECK(solved_at >= 1);
    CHECK(solved_at <= 8);
  }
}

TEST_CASE("lock planner reports a node budget overrun") {
  LockPlanner tiny(LockGame{}, 10);
  CHECK_THROWS_AS(tiny.decide(LockBelief::uniform(LockGame{}), "", 8), BudgetExceeded);
}
