#include <cmath>

#include "doctest.h"
#include "psrl/metrics/metrics.hpp"

using namespace psrl;

TEST_CASE("aggregate hand arithmetic") {
  AggregateCurve one = aggregate(std::vector<std::vector<double>>{{1.0, 2.0, 3.0}});
  CHECK(one.num_trials == 1);
  CHECK(one.mean == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(one.std_error == std::vector<double>{0.0, 0.0, 0.0});
  AggregateCurve same = aggregate(std::vector<std::vector<double>>{{0.5, 0.25}, {0.5, 0.25}});
  CHECK(same.std_error == std::vector<double>{0.0, 0.0});
  AggregateCurve two = aggregate(std::vector<std::vector<double>>{{0.0, 1.0}, {2.0, 3.0}});
  CHECK(two.mean == std::vector<double>{1.0, 2.0});
  CHECK(two.std_error[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(two.std_error[1] == doctest::Approx(1.0).epsilon(1e-15));
  // (1, 2, 6): mean 3, sample variance 7, se sqrt(7/3)
  AggregateCurve three = aggregate(std::vector<std::vector<double>>{{1.0}, {2.0}, {6.0}});
  CHECK(three.mean[0] == doctest::Approx(3.0));
  CHECK(three.std_error[0] == doctest::Approx(std::sqrt(7.0 / 3.0)));
  CHECK_THROWS(aggregate(std::vector<std::vector<double>>{}));
  CHECK_THROWS(aggregate(std::vector<std::vector<double>>{{1.0}, {1.0, 2.0}}));
}

TEST_CASE("aggregate commutes with cumulative sums") {
  std::vector<RegretCurve> curves{{0, {0.2, 0.1, 0.0, 0.3}}, {1, {0.4, 0.0, 0.2, 0.1}}, {2, {0.0, 0.5, 0.1, 0.1}}};
  std::vector<std::vector<double>> cum;
  for (const auto& c : curves) cum.push_back(c.cumulative());
  AggregateCurve of_cum = aggregate(cum);
  AggregateCurve per = aggregate(curves);
  double run = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    run += per.mean[i];
    CHECK(of_cum.mean[i] == doctest::Approx(run).epsilon(1e-12));
  }
  for (const auto& c : cum)
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] >= c[i - 1]);
}

TEST_CASE("suffix_failure worked examples") {
  CHECK(suffix_failure({2, 1, 2, 3, 2}, 1) == std::vector<int>{0, 0, 1, 1, 1});
  CHECK(suffix_failure({1, 1, 1}, 1) == std::vector<int>{0, 0, 0});
  CHECK(suffix_failure({2, 3, 2}, 1) == std::vector<int>{1, 1, 1});
  CHECK(suffix_failure({}, 1).empty());
}

TEST_CASE("suffix_failure recursion holds on random sequences") {
  std::vector<std::size_t> choices;
  std::uint64_t x = 12345;
  for (int i = 0; i < 200; ++i) {
    x = x * 6364136223846793005ULL + 1442695040888963407ULL;
    choices.push_back((x >> 33) % 4);
  }
  auto sf = suffix_failure(choices, 2);
  CHECK(sf.back() == (choices.back() != 2 ? 1 : 0));
  for (std::size_t t = 0; t + 1 < choices.size(); ++t) CHECK(sf[t] == (sf[t + 1] && choices[t] != 2 ? 1 : 0));
}

TEST_CASE("min_action_frequency worked examples") {
  // arms 1,2,3 mapped to indices 0,1,2
  auto v = min_action_frequency({0, 0, 1, 2}, 3);
  CHECK(v[3] == doctest::Approx(0.75));
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
  auto rr = min_action_frequency({0, 1, 2, 3}, 4);
  CHECK(rr[3] == 1.0);
  for (double f : min_action_frequency({3, 1, 1, 0, 2, 2, 3, 0, 1}, 4)) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
  CHECK_THROWS(min_action_frequency({0}, 0));
}

TEST_CASE("token_summary arithmetic") {
  TokenSummary empty = token_summary(TokenLedger{}, TokenPrices{});
  CHECK(empty.total.total() == 0);
  CHECK(empty.cost_dollars == 0.0);
  CHECK(empty.mean_tokens_per_episode == 0.0);

  TokenLedger ledger;
  for (std::size_t k = 0; k < 10; ++k) {
    ledger.add("posterior_sampler", k, 300, 200);
    ledger.add("sample_policy", k, 400, 100);
    ledger.add("posterior_updater", k, 300, 500);
  }
  TokenSummary s = token_summary(ledger, TokenPrices{});
  CHECK(s.per_episode_total.size() == 10);
  for (const auto& [k, c] : s.per_episode_total) {
    CHECK(c.input == 1000);
    CHECK(c.output == 800);
    CHECK(c.total() == 1800);
  }
  CHECK(s.mean_tokens_per_episode == 1800.0);
  CHECK(s.total.input == 10000);
  CHECK(s.total.output == 8000);
  CHECK(s.cost_dollars == doctest::Approx(10000 * 2.5e-6 + 8000 * 10e-6));
  CHECK(s.per_role_per_episode.at("sample_policy").input == 400.0);
  CHECK(s.per_role_per_episode.at("posterior_updater").output == 500.0);

  TokenSummary over20 = token_summary(ledger, TokenPrices{}, 20);
  CHECK(over20.mean_tokens_per_episode == 900.0);
  CHECK(over20.per_role_per_episode.at("sample_policy").input == 200.0);

  TokenLedger other;
  other.add("sample_policy", 3, 5, 6);
  ledger.merge(other);
  CHECK(ledger.episode_total(3).input == 1005);
  CHECK(ledger.episode_total(3).output == 806);
}

TEST_CASE("reference token table carries one row per environment") {
  const auto& ref = reference_token_use();
  CHECK(ref.size() == 4);
  for (const auto& r : ref) {
    CHECK(r.input_tokens_per_episode > 0);
    CHECK(r.output_tokens_per_episode > 0);
    CHECK(r.single_trial_dollars > 0);
  }
}
