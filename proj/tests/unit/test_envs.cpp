#include <array>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "psrl/core/errors.hpp"
#include "psrl/envs/bandit.hpp"
#include "psrl/envs/customer.hpp"
#include "psrl/envs/guess.hpp"
#include "psrl/envs/riverswim.hpp"

using namespace psrl;
using psrl::test::SequenceAgent;

TEST_CASE("bernoulli_pull extremes and Monte Carlo mean") {
  BernoulliBanditSpec spec{{1.0, 0.0, 0.6}, 0};
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    CHECK(bernoulli_pull(spec, 0, rng) == 1.0);
    CHECK(bernoulli_pull(spec, 1, rng) == 0.0);
  }
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) sum += bernoulli_pull(spec, 2, rng);
  CHECK(std::abs(sum / 10000.0 - 0.6) <= 0.02);
  CHECK_THROWS_AS(bernoulli_pull(spec, 3, rng), RejectedAction);
}

TEST_CASE("bandit evaluation instance has one 0.6 arm among 0.4s and a uniform optimal index") {
  Rng rng(3);
  std::array<int, 5> hits{};
  for (int t = 0; t < 5000; ++t) {
    auto spec = BernoulliBanditSpec::evaluation_instance(rng);
    REQUIRE(spec.arm_means.size() == 5);
    int best = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      if (i == spec.optimal_index) CHECK(spec.arm_means[i] == 0.6);
      else CHECK(spec.arm_means[i] == 0.4);
      best += spec.arm_means[i] == 0.6;
    }
    CHECK(best == 1);
    CHECK(spec.action_gap() == doctest::Approx(0.2));
    ++hits[spec.optimal_index];
  }
  for (int h : hits) CHECK(std::abs(h / 5000.0 - 0.2) < 0.03);
}

TEST_CASE("bandit spec requires a unique maximum") {
  CHECK_THROWS((BernoulliBanditSpec{{0.5, 0.5}, 0}.validate()));
  CHECK_THROWS((BernoulliBanditSpec{{0.6, 0.4}, 1}.validate()));
  CHECK_NOTHROW((BernoulliBanditSpec{{0.6, 0.4}, 0}.validate()));
}

TEST_CASE("BernoulliBandit regret uses true means") {
  BernoulliBandit env({{0.4, 0.6, 0.4}, 1}, {"Q", "W", "E"});
  Rng rng(1);
  SequenceAgent agent({"Q"});
  Trajectory t = run_episode(env, agent, {1, 1}, 0, rng);
  REQUIRE(env.expected_regret(t).has_value());
  CHECK(*env.expected_regret(t) == doctest::Approx(0.2));
  CHECK_FALSE(env.solved(t));
  CHECK(*env.optimal_action() == "W");
}

TEST_CASE("random letter labels are distinct uppercase letters") {
  Rng rng(8);
  auto labels = random_letter_labels(rng, 5);
  std::set<std::string> seen(labels.begin(), labels.end());
  CHECK(seen.size() == 5);
  for (const auto& l : labels) {
    REQUIRE(l.size() == 1);
    CHECK(l[0] >= 'A');
    CHECK(l[0] <= 'Z');
  }
}

TEST_CASE("informative_pull follows the deterministic reward rule") {
  InformativeBanditSpec spec{10, 4};
  CHECK(informative_pull(spec, 0) == 0.125);
  CHECK(informative_pull(spec, 4) == 1.0);
  CHECK(informative_pull(spec, 7) == 0.0);
  CHECK_THROWS_AS(informative_pull(spec, 11), RejectedAction);
  CHECK_THROWS((InformativeBanditSpec{10, 0}.validate()));
  CHECK_THROWS((InformativeBanditSpec{10, 11}.validate()));
}

TEST_CASE("riverswim_step worked examples") {
  RiverSwimSpec spec = RiverSwimSpec::standard(3);
  Rng rng(1);
  auto left = riverswim_step(spec, 1, Swim::Left, rng);
  CHECK(left.reward == 0.005);
  CHECK(left.next_state == 1);
  auto interior_left = riverswim_step(spec, 3, Swim::Left, rng);
  CHECK(interior_left.reward == 0.0);
  CHECK(interior_left.next_state == 2);
  CHECK(riverswim_step(spec, 3, Swim::Right, rng).reward == 1.0);
  CHECK(riverswim_step(spec, 2, Swim::Right, rng).reward == 0.0);
  CHECK_THROWS(riverswim_step(spec, 0, Swim::Left, rng));
  CHECK_THROWS(riverswim_step(spec, 4, Swim::Left, rng));
}

TEST_CASE("riverswim_step interior right frequencies over 20000 seeded draws") {
  RiverSwimSpec spec = RiverSwimSpec::standard(3);
  Rng rng(2024);
  std::array<int, 4> counts{};
  for (int i = 0; i < 20000; ++i) ++counts[riverswim_step(spec, 2, Swim::Right, rng).next_state];
  CHECK(std::abs(counts[1] / 20000.0 - 0.05) <= 0.01);
  CHECK(std::abs(counts[2] / 20000.0 - 0.60) <= 0.01);
  CHECK(std::abs(counts[3] / 20000.0 - 0.35) <= 0.01);
}

TEST_CASE("riverswim boundary right moves fold into stay") {
  RiverSwimSpec spec = RiverSwimSpec::standard(3);
  TabularMdp m = riverswim_mdp(spec);
  CHECK_NOTHROW(m.validate());
  // state 1
  CHECK(m.p(0, 1, 0) == doctest::Approx(0.65));
  CHECK(m.p(0, 1, 1) == doctest::Approx(0.35));
  // state 3
  CHECK(m.p(2, 1, 1) == doctest::Approx(0.05));
  CHECK(m.p(2, 1, 2) == doctest::Approx(0.95));
  CHECK(m.r(2, 1) == 1.0);
  CHECK(m.r(0, 0) == 0.005);
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a) {
      double row = 0.0;
      for (std::size_t n = 0; n < 3; ++n) row += m.p(s, a, n);
      CHECK(row == 1.0);
    }
}

TEST_CASE("riverswim standard lengths and description wording") {
  CHECK(RiverSwimSpec::standard(3).horizon == 6);
  CHECK(RiverSwimSpec::standard(4).horizon == 20);
  RiverSwim env(RiverSwimSpec::standard(3));
  CHECK(env.describe().find("three") != std::string::npos);
  CHECK(env.id() == "riverswim3");
  RiverSwim four(RiverSwimSpec::standard(4));
  CHECK(four.describe().find("four") != std::string::npos);
  CHECK_THROWS((RiverSwimSpec{1, 6, 0.35, 0.05, 0.005, 1.0}.validate()));
  CHECK_THROWS((RiverSwimSpec{3, 6, 0.8, 0.3, 0.005, 1.0}.validate()));
}

TEST_CASE("comblock_feedback on code 345") {
  CombLockSpec spec{"345"};
  CHECK(comblock_feedback(spec, 1, "3") == Feedback::CorrectPosition);
  CHECK(comblock_feedback(spec, 1, "4") == Feedback::WrongPosition);
  CHECK(comblock_feedback(spec, 2, "9") == Feedback::Absent);
  CHECK_THROWS_AS(comblock_feedback(spec, 1, "x"), RejectedAction);
  CHECK_THROWS_AS(comblock_feedback(spec, 1, "34"), RejectedAction);
  CHECK_THROWS((CombLockSpec{"335"}.validate()));
  CHECK_THROWS((CombLockSpec{"12"}.validate()));
}

TEST_CASE("all_lock_codes lists the 720 permutations in order") {
  const auto& codes = all_lock_codes();
  CHECK(codes.size() == 720);
  CHECK(codes.front() == "012");
  CHECK(codes.back() == "987");
  CHECK(std::is_sorted(codes.begin(), codes.end()));
  std::set<std::string> uniq(codes.begin(), codes.end());
  CHECK(uniq.size() == 720);
}

TEST_CASE("wordle_feedback on target crane") {
  WordleSpec spec{"crane"};
  CHECK(wordle_feedback(spec, 1, "c") == Feedback::CorrectPosition);
  CHECK(wordle_feedback(spec, 1, "r") == Feedback::WrongPosition);
  CHECK(wordle_feedback(spec, 3, "z") == Feedback::Absent);
  CHECK_THROWS_AS(wordle_feedback(spec, 1, "C"), RejectedAction);
  CHECK_THROWS_AS(wordle_feedback(spec, 1, "1"), RejectedAction);
}

TEST_CASE("wordle corpus loader rejects repeated letters and wrong lengths") {
  CHECK(parse_wordle_corpus("crane\n\nslate\n") == std::vector<std::string>{"crane", "slate"});
  try {
    parse_wordle_corpus("crane\nhello\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_wordle_corpus("cranes\n"), ParseError);
  CHECK_THROWS_AS(parse_wordle_corpus("cran\n"), ParseError);
  CHECK_THROWS_AS(parse_wordle_corpus("Crane\n"), ParseError);
}

TEST_CASE("bundled wordle corpus is valid") {
  auto words = load_wordle_corpus(std::string(PSRL_DATA_DIR) + "/wordle_words.txt");
  CHECK(words.size() >= 100);
  std::set<std::string> uniq(words.begin(), words.end());
  CHECK(uniq.size() == words.size());
}

TEST_CASE("guess state text round-trips and replays byte-for-byte") {
  std::vector<GuessEntry> entries{{'3', Feedback::CorrectPosition}, {'4', Feedback::WrongPosition},
                                  {'9', Feedback::Absent}};
  const std::string text = render_guess_state(lock_vocabulary(), entries);
  CHECK(text ==
        "Digits entered so far: 3, 4, 9. Digit 3 is in the correct position. Digit 4 is in the code but in the "
        "wrong position. Digit 9 does not appear in the code.");
  CHECK(parse_guess_state(lock_vocabulary(), text) == entries);
  CHECK(render_guess_state(wordle_vocabulary(), {}) == "No letters entered yet.");
  CHECK(parse_guess_state(wordle_vocabulary(), "No letters entered yet.").empty());
  CHECK_THROWS_AS(parse_guess_state(lock_vocabulary(), "Digits entered so far: 3. Digit 3 is great."), ParseError);

  CombinationLock a({"345"});
  CombinationLock b({"345"});
  SequenceAgent pa({"5", "4", "1"});
  SequenceAgent pb({"5", "4", "1"});
  Rng r1(1), r2(99);
  Trajectory t1 = run_episode(a, pa, {1, 3}, 0, r1);
  Trajectory t2 = run_episode(b, pb, {1, 3}, 0, r2);
  CHECK(t1.steps == t2.steps);
  CHECK(t1.steps[2].next_state ==
        "Digits entered so far: 5, 4, 1. Digit 5 is in the code but in the wrong position. Digit 4 is in the "
        "correct position. Digit 1 does not appear in the code.");
}

TEST_CASE("wordle episode solves on the exact target") {
  Wordle env({"crane"});
  SequenceAgent agent({"c", "r", "a", "n", "e"});
  Rng rng(0);
  Trajectory t = run_episode(env, agent, {1, 5}, 0, rng);
  REQUIRE(t.steps.size() == 5);
  CHECK(t.total_reward() == 1.0);
  CHECK(env.solved(t));
}

namespace {

struct ScriptedChat {
  std::string customer;
  std::string judge;
  std::vector<std::string> roles;
  std::string operator()(const std::string& role, const std::string&, const std::string&) {
    roles.push_back(role);
    return role == "customer_sim" ? customer : judge;
  }
};

}  // namespace

TEST_CASE("customer_env_step resolution rules") {
  CustomerServiceSpec spec{"My printer jams.", "Replace the roller.", PriorMode::LlmGenerated};
  {
    ScriptedChat chat{"Goal reached", "<NOTVALID>", {}};
    auto turn = customer_env_step(spec, "Replace the roller.", std::ref(chat));
    CHECK(turn.resolved);
    CHECK(chat.roles == std::vector<std::string>{"customer_sim"});
  }
  {
    ScriptedChat chat{"Still broken.", "<NOTVALID>", {}};
    auto turn = customer_env_step(spec, "Try turning it off.", std::ref(chat));
    CHECK_FALSE(turn.resolved);
    CHECK(turn.customer_reply == "Still broken.");
    CHECK(chat.roles == std::vector<std::string>{"customer_sim", "judge"});
  }
  {
    ScriptedChat chat{"Thanks, trying that.", "The agent offered the fix. <VALID>", {}};
    CHECK(customer_env_step(spec, "Replace the roller.", std::ref(chat)).resolved);
  }
  CHECK(judge_says_valid("<VALID>"));
  CHECK_FALSE(judge_says_valid("<NOTVALID>"));
  CHECK_FALSE(judge_says_valid("first <VALID> then <NOTVALID>"));
  CHECK(judge_says_valid("first <NOTVALID> then <VALID>"));
  CHECK_FALSE(judge_says_valid("no verdict"));
}

TEST_CASE("customer dataset ingestion maps keys and ignores extras") {
  auto specs = parse_customer_dataset(
      R"([{"scenario": "A", "solution": "B", "id": 7}, {"task": "C", "answer": "D"}])");
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].scenario_text == "A");
  CHECK(specs[0].true_solution_text == "B");
  CHECK(specs[1].scenario_text == "C");
  CHECK(specs[1].true_solution_text == "D");
  auto wrapped = parse_customer_dataset(R"({"data": [{"issue": "E", "true_solution": "F"}]})");
  REQUIRE(wrapped.size() == 1);
  CHECK(wrapped[0].scenario_text == "E");
  CHECK_THROWS_AS(parse_customer_dataset(R"([{"scenario": "A"}])"), ParseError);
  CHECK_THROWS_AS(parse_customer_dataset("not json"), ParseError);
  auto bundled = load_customer_dataset(std::string(PSRL_DATA_DIR) + "/customer_service_sample.json");
  CHECK(bundled.size() == 3);
}
