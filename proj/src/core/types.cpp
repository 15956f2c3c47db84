#include "psrl/core/types.hpp"

#include <cmath>

#include "psrl/core/errors.hpp"

namespace psrl {

void Temperatures::validate() const {
  for (double t : {sampling, policy, posterior}) {
    if (!std::isfinite(t) || t < 0.0) throw Error("temperatures must be finite and >= 0");
  }
}

void EpisodeBudget::validate() const {
  if (episodes < 1 || horizon < 1) throw Error("episode budget requires episodes >= 1 and horizon >= 1");
}

}  // namespace psrl
