#include <algorithm>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "psrl/ids/ids.hpp"

using namespace psrl;

namespace {

// Every distribution on the simplex with weights in multiples of 1/step.
template <typename F>
void for_each_grid_point(std::size_t n, std::size_t step, F&& f) {
  std::vector<std::size_t> counts(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == n) {
      counts[i] = left;
      std::vector<double> dist(n);
      for (std::size_t k = 0; k < n; ++k) dist[k] = static_cast<double>(counts[k]) / static_cast<double>(step);
      f(dist);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, step);
}

double grid_oracle(const InfoRatioInputs& in, std::size_t step) {
  double best = kInfiniteRatio;
  for_each_grid_point(in.size(), step, [&](const std::vector<double>& d) { best = std::min(best, info_ratio(in, d)); });
  return best;
}

InfoRatioInputs random_inputs(Rng& rng, std::size_t n) {
  InfoRatioInputs in;
  for (std::size_t i = 0; i < n; ++i) {
    in.rho.push_back(0.05 + uniform01(rng));
    in.info.push_back(uniform01(rng) < 0.2 ? 0.0 : uniform01(rng) * 2.0);
  }
  if (std::all_of(in.info.begin(), in.info.end(), [](double x) { return x == 0.0; })) in.info[0] = 0.5;
  return in;
}

}  // namespace

TEST_CASE("info_ratio conventions and worked values") {
  CHECK(info_ratio({{0, 1}, {0, 1}}, {1, 0}) == 0.0);
  CHECK(info_ratio({{1, 1}, {1, 1}}, {0.3, 0.7}) == doctest::Approx(1.0));
  CHECK(info_ratio({{1, 1}, {0, 0}}, {0.5, 0.5}) == kInfiniteRatio);
  CHECK(info_ratio({{0.9, 0.8536}, {0.4690, 3.3219}}, {0, 1}) == doctest::Approx(0.8536 * 0.8536 / 3.3219));
  CHECK(info_ratio({{0.9, 0.8536}, {0.4690, 3.3219}}, {0, 1}) == doctest::Approx(0.2194).epsilon(1e-3));
  CHECK_THROWS(info_ratio({{-1, 1}, {1, 1}}, {1, 0}));
  CHECK_THROWS(info_ratio({{1, 1}, {1}}, {1, 0}));
}

TEST_CASE("exact_bandit_rho_info closed forms for a uniform posterior over ten arms") {
  std::vector<double> post(11, 0.1);
  post[0] = 0.0;
  InfoRatioInputs in = exact_bandit_rho_info(post);
  REQUIRE(in.size() == 11);
  double harmonic = 0.0;
  for (int k = 1; k <= 10; ++k) harmonic += 1.0 / (2.0 * k);
  CHECK(in.rho[0] == doctest::Approx(1.0 - harmonic / 10.0).epsilon(1e-12));
  CHECK(in.rho[0] == doctest::Approx(0.8536).epsilon(1e-4));
  CHECK(in.info[0] == doctest::Approx(std::log2(10.0)).epsilon(1e-12));
  for (std::size_t a = 1; a <= 10; ++a) {
    CHECK(in.rho[a] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(in.info[a] == doctest::Approx(std::log2(10.0) - 0.9 * std::log2(9.0)).epsilon(1e-12));
    CHECK(in.info[a] == doctest::Approx(0.4690).epsilon(1e-3));
  }
}

TEST_CASE("exact_bandit_rho_info on a point mass has zero information everywhere") {
  std::vector<double> post(11, 0.0);
  post[4] = 1.0;
  InfoRatioInputs in = exact_bandit_rho_info(post);
  for (double i : in.info) CHECK(i == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(in.rho[4] == 0.0);
  CHECK(in.rho[0] == doctest::Approx(1.0 - 0.125));
}

TEST_CASE("exact_bandit_rho_info keeps information within the prior entropy") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> post(8, 0.0);
    double z = 0.0;
    for (std::size_t k = 1; k < 8; ++k) z += (post[k] = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng));
    if (z == 0.0) z = post[1] = 1.0;
    for (double& p : post) p /= z;
    InfoRatioInputs in = exact_bandit_rho_info(post);
    const double h = entropy_bits(post);
    for (std::size_t a = 0; a < in.size(); ++a) {
      CHECK(in.info[a] >= -1e-12);
      CHECK(in.info[a] <= h + 1e-12);
      CHECK(in.rho[a] >= 0.0);
      CHECK(in.rho[a] <= 1.0);
    }
  }
}

TEST_CASE("minimize_info_ratio prefers the smallest zero-regret action") {
  IdsDistribution d = minimize_info_ratio({{0.5, 0.0, 0.0}, {1.0, 0.0, 2.0}});
  CHECK(d.first == 1);
  CHECK(d.second == 1);
  CHECK(d.weight_first == 1.0);
  CHECK(d.ratio == 0.0);
}

TEST_CASE("minimize_info_ratio picks the informative arm for the uniform ten-arm bandit") {
  std::vector<double> post(11, 0.1);
  post[0] = 0.0;
  IdsDistribution d = minimize_info_ratio(exact_bandit_rho_info(post));
  CHECK(d.first == 0);
  CHECK(d.second == 0);
  CHECK(d.weight_first == 1.0);
  CHECK(d.as_vector(11)[0] == 1.0);
}

TEST_CASE("minimize_info_ratio with no finite ratio throws") {
  CHECK_THROWS_AS(minimize_info_ratio({{0.3, 0.4}, {0.0, 0.0}}), NoFiniteRatio);
}

TEST_CASE("minimize_info_ratio is never worse than a 1/20 simplex grid over five actions") {
  Rng rng(2718);
  for (int t = 0; t < 40; ++t) {
    InfoRatioInputs in = random_inputs(rng, 5);
    IdsDistribution d = minimize_info_ratio(in);
    const double oracle = grid_oracle(in, 20);
    CHECK(d.ratio <= oracle * (1 + 1e-6) + 1e-12);
    CHECK(info_ratio(in, d.as_vector(5)) == doctest::Approx(d.ratio).epsilon(1e-12));
  }
}

TEST_CASE("minimize_info_ratio beats every point mass and scales with information") {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    InfoRatioInputs in = random_inputs(rng, 4);
    IdsDistribution d = minimize_info_ratio(in);
    for (std::size_t a = 0; a < 4; ++a) {
      std::vector<double> e(4, 0.0);
      e[a] = 1.0;
      CHECK(d.ratio <= info_ratio(in, e) + 1e-12);
    }
    InfoRatioInputs scaled = in;
    for (double& i : scaled.info) i *= 4.0;
    IdsDistribution ds = minimize_info_ratio(scaled);
    CHECK(ds.ratio == doctest::Approx(d.ratio / 4.0).epsilon(1e-9));
    CHECK(ds.first == d.first);
    CHECK(ds.second == d.second);
    CHECK(ds.weight_first == d.weight_first);
  }
}

TEST_CASE("IdsDistribution sampling follows the mixing weight") {
  IdsDistribution d{1, 3, 0.25, 0.0};
  auto v = d.as_vector(4);
  CHECK(v == std::vector<double>{0.0, 0.25, 0.0, 0.75});
  Rng rng(5);
  int firsts = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = d.sample(rng);
    CHECK((a == 1 || a == 3));
    firsts += a == 1;
  }
  CHECK(std::abs(firsts / 10000.0 - 0.25) < 0.02);
}
