#pragma once

#include <string>
#include <vector>

#include "psrl/core/trajectory.hpp"

namespace psrl::llm {

// Canonical reward text: shortest round-trip decimal ("0", "0.005", "1").
std::string format_reward(double reward);

// One <EXPERIENCE> block with State, Action, Reward and Next state lines.
std::string render_experience(const Experience& e);
// One block per step, joined by newlines. Empty trajectories render as "".
std::string render_trajectory(const Trajectory& t);
std::string render_experiences(const std::vector<Experience>& steps);

// Partial blocks used as in-context examples by the world-model baselines.
std::string render_transition_example(const Experience& e);  // state, action, next state
std::string render_reward_example(const Experience& e);      // state, action, reward
std::string render_policy_example(const Experience& e);      // state, action

// Number of <EXPERIENCE> blocks in `text`.
std::size_t count_experience_blocks(const std::string& text);

// Parses text produced by render_experiences back into steps.
std::vector<Experience> parse_experiences(const std::string& text);

}  // namespace psrl::llm
