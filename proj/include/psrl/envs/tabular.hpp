#pragma once

#include <string>

#include "psrl/core/environment.hpp"
#include "psrl/core/mdp.hpp"

namespace psrl {

// An environment backed by a known TabularMdp, with a bijection between
// text labels and tabular indices.
class TabularEnvironment : public Environment {
 public:
  virtual const TabularMdp& true_mdp() const = 0;
  virtual std::string state_label(std::size_t s) const = 0;
  virtual std::size_t state_index(const std::string& label) const = 0;
  virtual std::string action_label(std::size_t a) const = 0;
  virtual std::size_t action_index(const std::string& label) const = 0;
};

}  // namespace psrl
