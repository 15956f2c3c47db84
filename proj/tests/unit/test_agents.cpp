#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "doctest.h"
#include "psrl/agents/classical.hpp"
#include "psrl/agents/llm_agents.hpp"
#include "psrl/envs/bandit.hpp"
#include "psrl/envs/guess.hpp"
#include "psrl/envs/riverswim.hpp"
#include "psrl/llm/backends.hpp"
#include "psrl/llm/knowledge.hpp"
#include "psrl/llm/oracle.hpp"
#include "psrl/llm/serialize.hpp"

using namespace psrl;
using namespace psrl::llm;

namespace {

LlmAgentContext context_for(LlmClient& client, const Environment& env) {
  return {&client, nullptr, env.describe(), [&env](const std::string& s) { return env.action_set(s); }};
}

knowledge::TabularLabels labels_of(const TabularEnvironment& env) {
  knowledge::TabularLabels l;
  for (std::size_t s = 0; s < env.true_mdp().num_states; ++s) l.states.push_back(env.state_label(s));
  for (std::size_t a = 0; a < env.true_mdp().num_actions; ++a) l.actions.push_back(env.action_label(a));
  return l;
}

OracleSpec lock_oracle() {
  OracleSpec s;
  s.env = OracleEnv::Lock;
  s.sampler_user_template = "comblock.sampler.user";
  return s;
}

LlmPsrlConfig lock_config(const std::string& prior) {
  LlmPsrlConfig c;
  c.sampler_system_template = "comblock.sampler.system";
  c.sampler_user_template = "comblock.sampler.user";
  c.initial_prior = prior;
  return c;
}

std::vector<std::string> guesses_of(const Trajectory& t) {
  std::string g;
  for (const auto& e : t.steps) g += e.action;
  return {g};
}

}  // namespace

TEST_CASE("thompson selection examples") {
  Rng rng(11);
  BetaBelief sharp = BetaBelief::uniform(5, 1.0, 1e9);
  sharp.alpha[3] = 1e9;
  sharp.beta[3] = 1.0;
  for (int i = 0; i < 200; ++i) CHECK(ts_bandit_select(sharp, rng) == 3);

  const BetaBelief flat = BetaBelief::uniform(5);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 10'000; ++i) ++counts[ts_bandit_select(flat, rng)];
  for (int c : counts) CHECK(std::abs(c / 10'000.0 - 0.2) < 0.03);

  BetaBelief learned = BetaBelief::uniform(5);
  for (int i = 0; i < 50; ++i)
    for (std::size_t a = 0; a < 5; ++a) learned = beta_update(learned, a, a == 2 ? 1.0 : 0.0);
  int hits = 0;
  for (int i = 0; i < 10'000; ++i) hits += ts_bandit_select(learned, rng) == 2;
  CHECK(hits > 9'000);
}

TEST_CASE("thompson agent learns from episodes") {
  Rng env_rng(3);
  BernoulliBandit env(BernoulliBanditSpec{{0.1, 0.9}, 1}, {"Q", "W"});
  ThompsonBanditAgent agent({"Q", "W"}, Rng(4));
  for (std::size_t k = 0; k < 200; ++k) run_episode(env, agent, {200, 1}, k, env_rng);
  CHECK(agent.belief().alpha[1] + agent.belief().beta[1] > agent.belief().alpha[0] + agent.belief().beta[0]);
}

TEST_CASE("vanilla psrl with point-mass beliefs plays the optimal policy") {
  RiverSwim env(RiverSwimSpec::standard(3));
  VanillaPsrlAgent agent(env, {}, Rng(5));
  agent.set_point_mass(env.true_mdp());
  Rng rng(6);
  const auto truth = greedy_policy(value_iteration(env.true_mdp()), rng);
  std::vector<double> regrets;
  for (std::size_t k = 0; k < 1000; ++k) {
    const Trajectory t = run_episode(env, agent, {1000, 6}, k, rng);
    if (k == 0) CHECK(agent.policy().action == truth.action);
    regrets.push_back(realized_regret(env, t));
  }
  const double mean = std::accumulate(regrets.begin(), regrets.end(), 0.0) / 1000.0;
  double var = 0.0;
  for (double r : regrets) var += (r - mean) * (r - mean);
  const double se = std::sqrt(var / 999.0 / 1000.0);
  CHECK(std::abs(mean) <= 2.0 * se);
}

TEST_CASE("vanilla psrl prior-only policies vary across seeds") {
  RiverSwim env(RiverSwimSpec::standard(3));
  std::set<std::vector<std::size_t>> policies;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    VanillaPsrlAgent agent(env, {}, Rng(seed));
    agent.begin_episode(0);
    policies.insert(agent.policy().action);
  }
  CHECK(policies.size() > 1);
}

TEST_CASE("vanilla psrl regret falls over 35 riverswim episodes") {
  RiverSwim env(RiverSwimSpec::standard(3));
  const double vstar = env.informed_optimal_value();
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    VanillaPsrlAgent agent(env, {}, derive_stream(seed, 1));
    Rng rng = derive_stream(seed, 2);
    double first = 0.0, last = 0.0;
    for (std::size_t k = 0; k < 35; ++k) {
      agent.begin_episode(k);
      const double regret = vstar - policy_value(env.true_mdp(), agent.policy());
      if (k < 10) first += regret;
      if (k >= 25) last += regret;
      Trajectory t;
      t.episode_index = k;
      std::string s = env.reset(rng);
      for (std::size_t h = 1; h <= 6; ++h) {
        const std::string a = agent.select_action(s, h);
        const auto out = env.step(s, a, rng);
        t.steps.push_back({s, a, out.reward, out.next_state});
        s = out.next_state;
      }
      agent.end_episode(t);
    }
    improved += last < first;
  }
  CHECK(improved >= 80);
}

TEST_CASE("policy_value matches value iteration for the greedy policy") {
  const TabularMdp m = riverswim_mdp(RiverSwimSpec::standard(3));
  Rng rng(1);
  const ValueTable t = value_iteration(m);
  CHECK(policy_value(m, greedy_policy(t, rng)) == doctest::Approx(t.initial_value(m)).epsilon(1e-12));
}

TEST_CASE("bayes lock agent solves within eight episodes") {
  auto planner = std::make_shared<LockPlanner>();
  for (const std::string code : {"012", "987", "345", "506"}) {
    CAPTURE(code);
    CombinationLock env(CombLockSpec{code});
    BayesLockAgent agent(8, planner);
    Rng rng(1);
    bool solved = false;
    for (std::size_t k = 0; k < 8 && !solved; ++k) solved = env.solved(run_episode(env, agent, {8, 3}, k, rng));
    CHECK(solved);
  }
}

TEST_CASE("llm psrl with the oracle backend solves the lock and keeps its call contract") {
  for (const std::string code : {"345", "019", "876"}) {
    CAPTURE(code);
    OracleBackend oracle(lock_oracle(), 21);
    LlmClient client(oracle);
    CombinationLock env(CombLockSpec{code});
    LlmPsrlAgent agent(context_for(client, env), lock_config(oracle.initial_knowledge()), Rng(2));
    Rng rng(3);
    std::vector<std::string> guesses;
    bool solved = false;
    for (std::size_t k = 0; k < 8 && !solved; ++k) {
      const Trajectory t = run_episode(env, agent, {8, 3}, k, rng);
      // Each hypothesis agrees with all feedback seen before its episode.
      const std::string hyp = knowledge::parse_guess_hypothesis(agent.hypotheses().back(), 3, "0123456789");
      for (const auto& g : guesses)
        for (std::size_t p = 0; p < 3; ++p) CHECK(classify(hyp, p, g[p]) == classify(code, p, g[p]));
      guesses.push_back(guesses_of(t)[0]);
      CHECK(guesses.back() == hyp);
      CHECK_FALSE(check_llm_psrl_calls(agent.episode_calls().back(), PosteriorUpdateMode::WholeTrajectory, false));
      solved = env.solved(t);
    }
    CHECK(solved);
  }
}

TEST_CASE("scripted sampler reply becomes the hypothesis verbatim") {
  ScriptedBackend backend({{"posterior_sampler", "", {"Reasoning first. You think the code is 123."}},
                           {"sample_policy", "", {"Action: 1"}},
                           {"posterior_updater", "", {"updated prior"}}});
  LlmClient client(backend);
  CombinationLock env(CombLockSpec{"123"});
  LlmPsrlAgent agent(context_for(client, env), lock_config("initial prior"), Rng(1));
  Rng rng(1);
  run_episode(env, agent, {1, 3}, 0, rng);
  CHECK(agent.hypothesis() == "You think the code is 123.");
  CHECK(agent.posterior().text == "updated prior");
  // All policy calls in the episode embed the same hypothesis.
  std::set<std::string> systems;
  for (const auto& ex : client.exchanges())
    if (ex.request.role_tag == "sample_policy") systems.insert(ex.request.system.text);
  CHECK(systems.size() == 1);
}

TEST_CASE("wordle oracle hypothesis honours a known first letter") {
  OracleSpec spec;
  spec.env = OracleEnv::Wordle;
  spec.sampler_user_template = "wordle.sampler.user";
  spec.corpus = load_wordle_corpus(std::string(PSRL_DATA_DIR) + "/wordle_words.txt");
  OracleBackend oracle(spec, 9);
  LlmClient client(oracle);
  Wordle env(WordleSpec{"crane"});
  const std::string prior = knowledge::render_guess_knowledge(wordle_vocabulary(), 5, "a to z",
                                                              {{0, 'c', Feedback::CorrectPosition}});
  LlmPsrlConfig c;
  c.sampler_system_template = "wordle.sampler.system";
  c.sampler_user_template = "wordle.sampler.user";
  c.initial_prior = prior;
  for (int i = 0; i < 20; ++i) {
    LlmPsrlAgent agent(context_for(client, env), c, Rng(i));
    agent.begin_episode(0);
    CHECK(knowledge::parse_guess_hypothesis(agent.hypothesis(), 5, "abcdefghijklmnopqrstuvwxyz")[0] == 'c');
  }
}

TEST_CASE("policy cache makes one call per novel state and resets per episode") {
  ScriptedBackend backend({{"posterior_sampler", "", {"You think all caves are alike."}},
                           {"sample_policy", "", {"Action: A"}},
                           {"posterior_updater", "", {"still alike"}}});
  LlmClient client(backend);
  RiverSwim env(RiverSwimSpec::standard(3));
  LlmPsrlConfig c;
  c.sampler_system_template = "riverswim.sampler.system";
  c.sampler_user_template = "riverswim.sampler.user";
  c.initial_prior = "prior";
  auto ctx = context_for(client, env);
  ctx.policy_cache = true;
  LlmPsrlAgent agent(ctx, c, Rng(1));
  Rng rng(1);
  run_episode(env, agent, {2, 6}, 0, rng);
  // Always swimming left stays in Cave 1.
  CHECK(agent.episode_calls()[0].of("sample_policy") == 1);
  CHECK(agent.stats().cache_hits == 5);
  run_episode(env, agent, {2, 6}, 1, rng);
  CHECK(agent.episode_calls()[1].of("sample_policy") == 1);
  for (const auto& e : agent.episode_calls()) CHECK_FALSE(check_llm_psrl_calls(e, PosteriorUpdateMode::WholeTrajectory, true));
}

TEST_CASE("oracle policy on the true riverswim model matches the greedy policy") {
  RiverSwim env(RiverSwimSpec::standard(3));
  OracleSpec spec;
  spec.env = OracleEnv::Tabular;
  spec.tabular = labels_of(env);
  spec.horizon = 6;
  spec.sampler_user_template = "riverswim.sampler.user";
  OracleBackend oracle(spec, 1);
  const std::string hyp = knowledge::render_tabular_hypothesis(spec.tabular, env.true_mdp());
  Rng rng(1);
  const auto greedy = greedy_policy(value_iteration(env.true_mdp()), rng);
  const auto& reg = default_registry();
  for (std::size_t s = 0; s < 3; ++s) {
    ChatRequest r;
    r.role_tag = "sample_policy";
    r.system = Prompt::from_template(reg, "sample_policy.system",
                                     {{"Environment Description", env.describe()}, {"LLM-generated posterior sample", hyp}});
    r.user = Prompt::raw(env.state_label(s));
    CHECK(parse_action(oracle.complete(r).text, env.action_set("")) == env.action_label(greedy.at(0, s)));
  }
}

TEST_CASE("posterior update modes make one or H updater calls") {
  ScriptedBackend backend({{"posterior_sampler", "", {"You think so."}},
                           {"sample_policy", "", {"Action: B"}},
                           {"posterior_updater", "", {"next prior"}}});
  LlmClient client(backend);
  RiverSwim env(RiverSwimSpec::standard(3));
  LlmPsrlConfig c;
  c.sampler_system_template = "riverswim.sampler.system";
  c.sampler_user_template = "riverswim.sampler.user";
  c.initial_prior = "prior";
  c.update_mode = PosteriorUpdateMode::PerStep;
  LlmPsrlAgent per_step(context_for(client, env), c, Rng(1));
  Rng rng(1);
  run_episode(env, per_step, {1, 3}, 0, rng);
  CHECK(per_step.episode_calls()[0].of("posterior_updater") == 3);
  CHECK_FALSE(check_llm_psrl_calls(per_step.episode_calls()[0], PosteriorUpdateMode::PerStep, false));
  c.update_mode = PosteriorUpdateMode::WholeTrajectory;
  LlmPsrlAgent whole(context_for(client, env), c, Rng(1));
  run_episode(env, whole, {1, 3}, 0, rng);
  CHECK(whole.episode_calls()[0].of("posterior_updater") == 1);
  EpisodeCallCounts bad = whole.episode_calls()[0];
  bad.calls["posterior_sampler"] = 2;
  CHECK(check_llm_psrl_calls(bad, PosteriorUpdateMode::WholeTrajectory, false).has_value());
}

TEST_CASE("oracle bandit posterior matches conjugate updates") {
  const std::vector<std::string> labels{"Q", "W", "E", "R", "T"};
  Rng inst(2);
  BernoulliBandit env(BernoulliBanditSpec::evaluation_instance(inst), labels);
  OracleSpec spec;
  spec.env = OracleEnv::Bernoulli;
  spec.action_labels = labels;
  spec.sampler_user_template = "bernoulli.sampler.user";
  OracleBackend oracle(spec, 3);
  LlmClient client(oracle);
  LlmPsrlConfig c;
  c.sampler_system_template = "bernoulli.sampler.system";
  c.sampler_user_template = "bernoulli.sampler.user";
  c.initial_prior = oracle.initial_knowledge();
  c.update_mode = PosteriorUpdateMode::PerStep;
  LlmPsrlAgent agent(context_for(client, env), c, Rng(4));
  BetaBelief exact = BetaBelief::uniform(5);
  Rng rng(5);
  for (std::size_t k = 0; k < 30; ++k) {
    const Trajectory t = run_episode(env, agent, {30, 1}, k, rng);
    exact = beta_update(exact, env.arm_index(t.steps[0].action), t.steps[0].reward);
  }
  const BetaBelief text = knowledge::parse_beta_knowledge(labels, agent.posterior().text);
  CHECK(text.alpha == exact.alpha);
  CHECK(text.beta == exact.beta);
}

TEST_CASE("icrl replay inclusion") {
  ReplayBuffer b(0.1);
  for (int i = 0; i < 100; ++i) b.add(fmt::format("episode {}", i));
  Rng rng(8);
  double total = 0.0;
  int near = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<double>(b.sample(rng).size());
    total += n;
    near += std::abs(n - 10.0) <= 4.0;
  }
  CHECK(std::abs(total / 1000.0 - 10.0) < 0.5);
  CHECK(near > 800);
  CHECK_THROWS(ReplayBuffer(0.0));

  ScriptedBackend backend({{"icrl_policy", "", {"B"}}});
  LlmClient client(backend);
  RiverSwim env(RiverSwimSpec::standard(3));
  IcrlAgent agent(context_for(client, env), {1.0, 1.0}, Rng(1));
  Rng erng(2);
  std::vector<std::string> prompts;
  for (std::size_t k = 0; k < 4; ++k) {
    run_episode(env, agent, {4, 2}, k, erng);
    for (const auto& ex : client.exchanges()) prompts.push_back(ex.request.user.bindings.at("(Potentially sub-sampled) history of past episodes"));
    CHECK(agent.last_included().size() == k);
  }
  // First prompt of the first episode has no history.
  CHECK(client.exchanges()[0].request.user.bindings.at("(Potentially sub-sampled) history of past episodes").empty());
  // With p = 1 the history only grows.
  const auto& ex = client.exchanges();
  for (std::size_t i = 1; i < ex.size(); ++i) {
    const auto& prev = ex[i - 1].request.user.bindings.at("(Potentially sub-sampled) history of past episodes");
    const auto& cur = ex[i].request.user.bindings.at("(Potentially sub-sampled) history of past episodes");
    CHECK(cur.compare(0, prev.size(), prev) == 0);
  }
  CHECK(count_experience_blocks(ex.back().request.user.text) == 7);
}

TEST_CASE("reflexion keeps one reflection per episode, all sent to the policy") {
  ScriptedBackend backend({{"reflexion_reflector", "", {"Swim right more.", "Keep going right.", "Right is best."}},
                           {"reflexion_policy", "", {"Action: B"}}});
  LlmClient client(backend);
  RiverSwim env(RiverSwimSpec::standard(3));
  ReflexionAgent agent(context_for(client, env), {}, Rng(1));
  Rng rng(1);
  for (std::size_t k = 0; k < 3; ++k) {
    run_episode(env, agent, {4, 2}, k, rng);
    CHECK(agent.log().reflections.size() == k + 1);
  }
  agent.begin_episode(3);
  agent.select_action("Cave 1", 1);
  const std::string& user = client.exchanges().back().request.user.text;
  const auto a = user.find("Reflection 1: Swim right more.");
  const auto b = user.find("Reflection 2: Keep going right.");
  const auto c = user.find("Reflection 3: Right is best.");
  CHECK(a != std::string::npos);
  CHECK(b > a);
  CHECK(c > b);
  CHECK(c != std::string::npos);
}

TEST_CASE("icpi picks the action with the best simulated return") {
  ScriptedBackend backend({{"icpi_reward", "The current action is: W\\.", {"1"}}, {"icpi_reward", "", {"0"}}});
  LlmClient client(backend);
  BernoulliBandit env(BernoulliBanditSpec{{0.4, 0.6, 0.4}, 1}, {"Q", "W", "E"});
  IcpiAgent agent(context_for(client, env), {1, 0, 1, 1.0}, Rng(1));
  Rng rng(1);
  for (std::size_t k = 0; k < 5; ++k) CHECK(run_episode(env, agent, {5, 1}, k, rng).steps[0].action == "W");

  ScriptedBackend flat({{"icpi_reward", "", {"0.5"}}});
  LlmClient flat_client(flat);
  IcpiAgent tie(context_for(flat_client, env), {1, 0, 1, 1.0}, Rng(2));
  std::map<std::string, int> counts;
  for (int i = 0; i < 1000; ++i) ++counts[tie.select_action(kBanditState, 1)];
  for (const auto& l : {"Q", "W", "E"}) CHECK(std::abs(counts[l] / 1000.0 - 1.0 / 3.0) < 0.05);
}

TEST_CASE("icpi stays within its per-timestep call budget") {
  ScriptedBackend backend({{"icpi_reward", "", {"0"}}, {"icpi_transition", "", {"Cave 2"}},
                           {"icpi_rollout", "", {"Action: B"}}});
  LlmClient client(backend);
  RiverSwim env(RiverSwimSpec::standard(3));
  IcpiAgent agent(context_for(client, env), {6, 3, 1, 1.0}, Rng(1));
  agent.begin_episode(0);
  for (std::size_t h = 1; h <= 6; ++h) {
    const std::size_t before = client.calls();
    agent.select_action("Cave 1", h);
    const std::size_t used = client.calls() - before;
    CHECK(used <= 2 * 3 * 3);
    CHECK(used > 0);
  }
}

TEST_CASE("llm ids with the oracle explores the informative arm then exploits") {
  for (std::size_t star = 1; star <= 10; ++star) {
    CAPTURE(star);
    InformativeBandit env(InformativeBanditSpec{10, star});
    OracleSpec spec;
    spec.env = OracleEnv::Informative;
    spec.action_labels = env.action_set("");
    spec.sampler_user_template = "informative.sampler.user";
    OracleBackend oracle(spec, star);
    LlmClient client(oracle);
    LlmIdsConfig c;
    c.initial_prior = oracle.initial_knowledge();
    LlmIdsAgent agent(context_for(client, env), c, Rng(star));
    Rng rng(1);
    for (std::size_t k = 0; k < 4; ++k) {
      const Trajectory t = run_episode(env, agent, {4, 1}, k, rng);
      CHECK(t.steps[0].action == (k == 0 ? "0" : std::to_string(star)));
    }
    const auto& first = agent.decisions()[0];
    CHECK(first.distribution.first == 0);
    CHECK(first.distribution.weight_first == 1.0);
    CHECK(client.calls() == 4 * (2 * 11 + 1));
  }
}

TEST_CASE("scripted zero regret gives a point mass") {
  ScriptedBackend backend({{"ids_regret", "candidate action: 2\\.", {"Final expected regret: 0"}},
                           {"ids_regret", "", {"Final expected regret: 0.5"}},
                           {"ids_info", "", {"Final information gain: 0.3"}},
                           {"posterior_updater", "", {"posterior"}}});
  LlmClient client(backend);
  InformativeBandit env(InformativeBanditSpec{3, 2});
  LlmIdsConfig c;
  c.initial_prior = "prior";
  LlmIdsAgent agent(context_for(client, env), c, Rng(1));
  Rng rng(1);
  CHECK(run_episode(env, agent, {1, 1}, 0, rng).steps[0].action == "2");
  CHECK(agent.decisions()[0].distribution.weight_first == 1.0);
}

TEST_CASE("unparseable policy replies re-prompt once then act randomly") {
  ScriptedBackend backend({{"posterior_sampler", "", {"You think so."}},
                           {"sample_policy", "", {"I cannot decide."}},
                           {"posterior_updater", "", {"next"}}});
  LlmClient client(backend);
  RiverSwim env(RiverSwimSpec::standard(3));
  LlmPsrlConfig c;
  c.sampler_system_template = "riverswim.sampler.system";
  c.sampler_user_template = "riverswim.sampler.user";
  c.initial_prior = "prior";
  LlmPsrlAgent agent(context_for(client, env), c, Rng(1));
  Rng rng(1);
  run_episode(env, agent, {1, 2}, 0, rng);
  CHECK(agent.stats().reprompts == 2);
  CHECK(agent.stats().fallbacks == 2);
  CHECK(agent.stats().warnings.size() == 2);
  CHECK_FALSE(check_llm_psrl_calls(agent.episode_calls()[0], PosteriorUpdateMode::WholeTrajectory, false));

  ScriptedBackend bad_scalar({{"ids_regret", "", {"no idea"}}});
  LlmClient c2(bad_scalar);
  InformativeBandit ib(InformativeBanditSpec{3, 1});
  LlmIdsConfig ic;
  ic.initial_prior = "prior";
  LlmIdsAgent ids(context_for(c2, ib), ic, Rng(1));
  ids.begin_episode(0);
  CHECK_THROWS_AS(ids.select_action(kBanditState, 1), UnparseableScalar);
  CHECK(c2.calls() == 2);
}

TEST_CASE("customer prior combines the broad prior with the generated supplement") {
  ScriptedBackend backend({{"prior_generator", "Be aware that one possible issue could be reset the router", {"Router issues: 0.6"}},
                           {"prior_generator", "", {"Cable issues: 0.5"}}});
  LlmClient client(backend);
  CustomerServiceSpec spec{"My internet is down.", "reset the router", PriorMode::WellSpecified};
  const std::string p = build_customer_prior(client, default_registry(), spec, 1.0);
  CHECK(p.find("You know that rewards are binary") == 0);
  CHECK(p.find("Router issues: 0.6") != std::string::npos);
  spec.prior_mode = PriorMode::LlmGenerated;
  CHECK(build_customer_prior(client, default_registry(), spec, 1.0).find("Cable issues: 0.5") != std::string::npos);
}
