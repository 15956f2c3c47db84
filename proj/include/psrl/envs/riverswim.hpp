#pragma once

#include <array>
#include <string>

#include "psrl/envs/tabular.hpp"

namespace psrl {

struct RiverSwimSpec {
  std::size_t length = 3;
  std::size_t horizon = 6;
  double up_success = 0.35;
  double up_pushback = 0.05;
  double small_reward = 0.005;
  double big_reward = 1.0;

  void validate() const;
  // Length 3 with H = 6, or length 4 with H = 20.
  static RiverSwimSpec standard(std::size_t length);
};

enum class Swim { Left, Right };

struct RiverSwimOutcome {
  double reward = 0.0;
  std::size_t next_state = 1;
};

// One transition from 1-based `state`. A `right` move consumes exactly one
// uniform01 draw: u < up_success moves up, u < up_success + up_pushback
// pushes back, anything else stays. Mass that would leave the chain stays.
// `left` consumes no draws.
RiverSwimOutcome riverswim_step(const RiverSwimSpec& spec, std::size_t state, Swim action, Rng& rng);

// The exact MDP with states 0..length-1 and actions 0 = left, 1 = right.
TabularMdp riverswim_mdp(const RiverSwimSpec& spec);

struct RiverSwimLabels {
  std::string left = "A";
  std::string right = "B";
};

class RiverSwim : public TabularEnvironment {
 public:
  using Labels = RiverSwimLabels;

  explicit RiverSwim(RiverSwimSpec spec, Labels labels = {});

  std::string id() const override;
  std::string reset(Rng& rng) override;
  StepOutcome step(const std::string& state, const std::string& action, Rng& rng) override;
  std::vector<std::string> action_set(const std::string& state) const override;
  std::string describe() const override;
  double informed_optimal_value() const override { return optimal_value_; }

  const TabularMdp& true_mdp() const override { return mdp_; }
  std::string state_label(std::size_t s) const override;
  std::size_t state_index(const std::string& label) const override;
  // The action set is always {left label, right label}, so index 0 is left.
  std::string action_label(std::size_t a) const override;
  std::size_t action_index(const std::string& label) const override;

  const RiverSwimSpec& spec() const { return spec_; }
  const Labels& labels() const { return labels_; }
  Swim direction(const std::string& action) const;

 private:
  RiverSwimSpec spec_;
  Labels labels_;
  std::vector<std::string> actions_;
  TabularMdp mdp_;
  double optimal_value_ = 0.0;
  std::size_t steps_taken_ = 0;
};

// "three", "four", ... for the environment description.
std::string number_word(std::size_t n);

}  // namespace psrl
