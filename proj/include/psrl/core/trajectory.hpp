#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace psrl {

struct Experience {
  std::string state;
  std::string action;
  double reward = 0.0;
  std::string next_state;

  bool operator==(const Experience&) const = default;
};

struct Trajectory {
  std::size_t episode_index = 0;
  std::vector<Experience> steps;

  double total_reward() const;
  // next_state of step h equals state of step h+1 for every h.
  bool chained() const;
};

class History {
 public:
  // Throws if the episode index does not exceed the last one appended.
  void append(Trajectory trajectory);
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  std::size_t size() const { return trajectories_.size(); }

 private:
  std::vector<Trajectory> trajectories_;
};

}  // namespace psrl
