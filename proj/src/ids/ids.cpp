#include "psrl/ids/ids.hpp"

#include <cmath>

#include <fmt/format.h>

namespace psrl {

void InfoRatioInputs::validate() const {
  if (rho.size() != info.size() || rho.empty()) throw Error("InfoRatioInputs: rho and info must have equal non-zero length");
  for (std::size_t a = 0; a < rho.size(); ++a) {
    if (!std::isfinite(rho[a]) || !std::isfinite(info[a]) || rho[a] < 0.0 || info[a] < 0.0) {
      throw Error(fmt::format("InfoRatioInputs: entry {} must be finite and non-negative", a));
    }
  }
}

std::vector<double> IdsDistribution::as_vector(std::size_t num_actions) const {
  std::vector<double> out(num_actions, 0.0);
  out.at(first) += weight_first;
  out.at(second) += 1.0 - weight_first;
  return out;
}

std::size_t IdsDistribution::sample(Rng& rng) const {
  if (first == second || weight_first >= 1.0) return first;
  if (weight_first <= 0.0) return second;
  return uniform01(rng) < weight_first ? first : second;
}

namespace {

double ratio_of(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den == 0.0) return kInfiniteRatio;
  return num * num / den;
}

}  // namespace

double info_ratio(const InfoRatioInputs& inputs, const std::vector<double>& dist) {
  inputs.validate();
  if (dist.size() != inputs.size()) throw Error("info_ratio: distribution length mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t a = 0; a < dist.size(); ++a) {
    if (dist[a] < 0.0) throw Error("info_ratio: negative probability");
    num += dist[a] * inputs.rho[a];
    den += dist[a] * inputs.info[a];
  }
  return ratio_of(num, den);
}

IdsDistribution minimize_info_ratio(const InfoRatioInputs& inputs, std::size_t grid_size) {
  inputs.validate();
  if (grid_size < 2) throw Error("minimize_info_ratio: grid_size must be >= 2");
  const std::size_t n = inputs.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (inputs.rho[a] == 0.0) return {a, a, 1.0, 0.0};
  }

  IdsDistribution best{0, 0, 1.0, kInfiniteRatio};
  bool found = false;
  auto consider = [&](std::size_t first, std::size_t second, double w, double r) {
    if (std::isfinite(r) && (!found || r < best.ratio)) {
      if (w >= 1.0) second = first;
      if (w <= 0.0) first = second;
      best = {first, second, first == second ? 1.0 : w, r};
      found = true;
    }
  };
  if (n == 1) consider(0, 0, 1.0, ratio_of(inputs.rho[0], inputs.info[0]));
  // Enumerating (a, b, weight) lexicographically and keeping only strict
  // improvements realises the tie-break order.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t i = 0; i < grid_size; ++i) {
        const double w = static_cast<double>(i) / static_cast<double>(grid_size - 1);
        const double num = w * inputs.rho[a] + (1.0 - w) * inputs.rho[b];
        const double den = w * inputs.info[a] + (1.0 - w) * inputs.info[b];
        consider(a, b, w, ratio_of(num, den));
      }
    }
  }
  if (!found) throw NoFiniteRatio("minimize_info_ratio: every action has positive regret and zero information");
  return best;
}

double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

InfoRatioInputs exact_bandit_rho_info(const std::vector<double>& posterior) {
  if (posterior.size() < 2) throw Error("exact_bandit_rho_info: need arms 0..K with K >= 1");
  if (posterior[0] != 0.0) throw Error("exact_bandit_rho_info: arm 0 cannot be optimal");
  double total = 0.0;
  for (double x : posterior) {
    if (!(x >= 0.0)) throw Error("exact_bandit_rho_info: negative probability");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("exact_bandit_rho_info: posterior must sum to 1");

  const std::size_t n = posterior.size();
  const double prior_entropy = entropy_bits(posterior);
  InfoRatioInputs out{std::vector<double>(n), std::vector<double>(n)};

  // Arm 0 pays 1/(2k) under A* = k, distinct for every k, so it reveals A*.
  double payoff0 = 0.0;
  for (std::size_t k = 1; k < n; ++k) payoff0 += posterior[k] / (2.0 * static_cast<double>(k));
  out.rho[0] = 1.0 - payoff0;
  out.info[0] = prior_entropy;

  for (std::size_t a = 1; a < n; ++a) {
    const double pa = posterior[a];
    out.rho[a] = 1.0 - pa;
    // Reward 1 pins A* = a; reward 0 leaves the posterior renormalised over
    // the other arms.
    double residual = 0.0;
    if (pa < 1.0) {
      std::vector<double> rest(posterior);
      rest[a] = 0.0;
      for (double& x : rest) x /= (1.0 - pa);
      residual = (1.0 - pa) * entropy_bits(rest);
    }
    out.info[a] = std::max(0.0, prior_entropy - residual);
  }
  return out;
}

}  // namespace psrl
