#pragma once

#include <cstddef>

namespace psrl {

// Temperatures of the three PSRL language-model roles.
struct Temperatures {
  double sampling = 1.0;
  double policy = 1.0;
  double posterior = 1.0;

  void validate() const;
};

struct EpisodeBudget {
  std::size_t episodes = 1;
  std::size_t horizon = 1;

  void validate() const;
};

}  // namespace psrl
