#include "psrl/envs/bandit.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "psrl/core/errors.hpp"
#include "psrl/llm/template.hpp"

namespace psrl {
namespace {

void check_single_step(const Trajectory& trajectory) {
  if (trajectory.steps.size() != 1) throw Error("bandit trajectories must contain exactly one step");
}

}  // namespace

void BernoulliBanditSpec::validate() const {
  if (arm_means.size() < 2) throw Error("BernoulliBandit: at least two arms required");
  if (optimal_index >= arm_means.size()) throw Error("BernoulliBandit: optimal_index out of range");
  for (std::size_t i = 0; i < arm_means.size(); ++i) {
    const double m = arm_means[i];
    if (!(m >= 0.0 && m <= 1.0)) throw Error(fmt::format("BernoulliBandit: mean {} outside [0,1]", m));
    if (i != optimal_index && m >= arm_means[optimal_index]) {
      throw Error("BernoulliBandit: optimal arm mean must be the unique maximum");
    }
  }
}

double BernoulliBanditSpec::action_gap() const {
  double second = 0.0;
  for (std::size_t i = 0; i < arm_means.size(); ++i) {
    if (i != optimal_index) second = std::max(second, arm_means[i]);
  }
  return arm_means[optimal_index] - second;
}

BernoulliBanditSpec BernoulliBanditSpec::evaluation_instance(Rng& rng, std::size_t arms, double best, double rest) {
  BernoulliBanditSpec spec;
  spec.optimal_index = uniform_index(rng, arms);
  spec.arm_means.assign(arms, rest);
  spec.arm_means[spec.optimal_index] = best;
  spec.validate();
  return spec;
}

double bernoulli_pull(const BernoulliBanditSpec& spec, std::size_t arm, Rng& rng) {
  if (arm >= spec.arm_means.size()) {
    throw RejectedAction(std::to_string(arm), fmt::format("BernoulliBandit: arm {} out of range", arm));
  }
  return bernoulli(rng, spec.arm_means[arm]) ? 1.0 : 0.0;
}

std::vector<std::string> random_letter_labels(Rng& rng, std::size_t count) {
  if (count > 26) throw Error("random_letter_labels: at most 26 labels");
  std::vector<char> letters(26);
  std::iota(letters.begin(), letters.end(), 'A');
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_index(rng, 26 - i);
    std::swap(letters[i], letters[j]);
    out.emplace_back(1, letters[i]);
  }
  return out;
}

BernoulliBandit::BernoulliBandit(BernoulliBanditSpec spec, std::vector<std::string> labels)
    : spec_(std::move(spec)), labels_(std::move(labels)) {
  spec_.validate();
  if (labels_.size() != spec_.arm_means.size()) throw Error("BernoulliBandit: one label per arm required");
  auto sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("BernoulliBandit: labels must be distinct");
  }
}

std::size_t BernoulliBandit::arm_index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw RejectedAction(label, fmt::format("BernoulliBandit: unknown action '{}'", label));
  return static_cast<std::size_t>(it - labels_.begin());
}

StepOutcome BernoulliBandit::step(const std::string&, const std::string& action, Rng& rng) {
  return {bernoulli_pull(spec_, arm_index(action), rng), kBanditState, true};
}

std::string BernoulliBandit::describe() const {
  return llm::default_registry().render("bernoulli.description",
                                        {{"List of randomly generated letters", fmt::format("{}", fmt::join(labels_, ", "))}});
}

double BernoulliBandit::informed_optimal_value() const { return spec_.arm_means[spec_.optimal_index]; }

std::optional<double> BernoulliBandit::expected_regret(const Trajectory& trajectory) const {
  check_single_step(trajectory);
  return informed_optimal_value() - spec_.arm_means[arm_index(trajectory.steps[0].action)];
}

bool BernoulliBandit::solved(const Trajectory& trajectory) const {
  check_single_step(trajectory);
  return arm_index(trajectory.steps[0].action) == spec_.optimal_index;
}

void InformativeBanditSpec::validate() const {
  if (num_informative_arms < 1) throw Error("InformativeBandit: need at least one informative arm");
  if (optimal_arm < 1 || optimal_arm > num_informative_arms) {
    throw Error(fmt::format("InformativeBandit: optimal arm {} outside [1, {}]", optimal_arm, num_informative_arms));
  }
}

double informative_pull(const InformativeBanditSpec& spec, std::size_t arm) {
  if (arm > spec.num_informative_arms) {
    throw RejectedAction(std::to_string(arm), fmt::format("InformativeBandit: arm {} out of range", arm));
  }
  if (arm == spec.optimal_arm) return 1.0;
  if (arm == 0) return 1.0 / (2.0 * static_cast<double>(spec.optimal_arm));
  return 0.0;
}

InformativeBandit::InformativeBandit(InformativeBanditSpec spec) : spec_(spec) {
  spec_.validate();
  for (std::size_t a = 0; a <= spec_.num_informative_arms; ++a) labels_.push_back(std::to_string(a));
}

std::size_t InformativeBandit::arm_index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw RejectedAction(label, fmt::format("InformativeBandit: unknown action '{}'", label));
  return static_cast<std::size_t>(it - labels_.begin());
}

StepOutcome InformativeBandit::step(const std::string&, const std::string& action, Rng&) {
  return {informative_pull(spec_, arm_index(action)), kBanditState, true};
}

std::string InformativeBandit::describe() const {
  return llm::default_registry().render(
      "informative.description", {{"Number of actions", std::to_string(labels_.size())},
                                  {"List of action IDs", fmt::format("{}", fmt::join(labels_, ", "))}});
}

std::optional<double> InformativeBandit::expected_regret(const Trajectory& trajectory) const {
  check_single_step(trajectory);
  return 1.0 - informative_pull(spec_, arm_index(trajectory.steps[0].action));
}

}  // namespace psrl
