#pragma once

#include <string>
#include <vector>

#include "psrl/core/environment.hpp"

namespace psrl {

struct BernoulliBanditSpec {
  std::vector<double> arm_means;
  std::size_t optimal_index = 0;

  // Requires a unique maximal mean at optimal_index.
  void validate() const;
  double action_gap() const;

  // One arm at `best`, the rest at `rest`, optimal index drawn uniformly.
  static BernoulliBanditSpec evaluation_instance(Rng& rng, std::size_t arms = 5, double best = 0.6,
                                                 double rest = 0.4);
};

double bernoulli_pull(const BernoulliBanditSpec& spec, std::size_t arm, Rng& rng);

// The single-state observation shown to bandit agents at every period.
inline constexpr const char* kBanditState = "Select one of the available actions.";

// Distinct uppercase letters drawn from rng, used as arm labels.
std::vector<std::string> random_letter_labels(Rng& rng, std::size_t count);

// A K-period bandit run as K episodes of horizon 1.
class BernoulliBandit : public Environment {
 public:
  BernoulliBandit(BernoulliBanditSpec spec, std::vector<std::string> labels);

  std::string id() const override { return "bernoulli"; }
  std::string reset(Rng&) override { return kBanditState; }
  StepOutcome step(const std::string& state, const std::string& action, Rng& rng) override;
  std::vector<std::string> action_set(const std::string&) const override { return labels_; }
  std::string describe() const override;
  // The optimal arm's mean.
  double informed_optimal_value() const override;
  std::optional<double> expected_regret(const Trajectory& trajectory) const override;
  std::optional<std::string> optimal_action() const override { return labels_[spec_.optimal_index]; }
  bool solved(const Trajectory& trajectory) const override;

  const BernoulliBanditSpec& spec() const { return spec_; }
  std::size_t arm_index(const std::string& label) const;

 private:
  BernoulliBanditSpec spec_;
  std::vector<std::string> labels_;
};

struct InformativeBanditSpec {
  std::size_t num_informative_arms = 10;
  std::size_t optimal_arm = 1;

  void validate() const;
};

// Deterministic payoff: 1 for the optimal arm, 1/(2 A*) for arm 0, else 0.
double informative_pull(const InformativeBanditSpec& spec, std::size_t arm);

// Actions are labelled "0".."K".
class InformativeBandit : public Environment {
 public:
  explicit InformativeBandit(InformativeBanditSpec spec);

  std::string id() const override { return "informative"; }
  std::string reset(Rng&) override { return kBanditState; }
  StepOutcome step(const std::string& state, const std::string& action, Rng& rng) override;
  std::vector<std::string> action_set(const std::string&) const override { return labels_; }
  std::string describe() const override;
  double informed_optimal_value() const override { return 1.0; }
  std::optional<double> expected_regret(const Trajectory& trajectory) const override;
  std::optional<std::string> optimal_action() const override { return labels_[spec_.optimal_arm]; }

  const InformativeBanditSpec& spec() const { return spec_; }
  std::size_t arm_index(const std::string& label) const;

 private:
  InformativeBanditSpec spec_;
  std::vector<std::string> labels_;
};

}  // namespace psrl
