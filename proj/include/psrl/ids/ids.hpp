#pragma once

#include <limits>
#include <vector>

#include "psrl/core/errors.hpp"
#include "psrl/core/rng.hpp"

namespace psrl {

struct InfoRatioInputs {
  std::vector<double> rho;   // expected regret per action
  std::vector<double> info;  // information gain per action, bits

  void validate() const;
  std::size_t size() const { return rho.size(); }
};

// At most two actions. A point mass has second == first and weight 1.
struct IdsDistribution {
  std::size_t first = 0;
  std::size_t second = 0;
  double weight_first = 1.0;
  double ratio = 0.0;

  std::vector<double> as_vector(std::size_t num_actions) const;
  std::size_t sample(Rng& rng) const;
};

inline constexpr double kInfiniteRatio = std::numeric_limits<double>::infinity();

// (sum pi rho)^2 / (sum pi I). A zero numerator gives 0; a positive
// numerator over a zero denominator gives kInfiniteRatio.
double info_ratio(const InfoRatioInputs& inputs, const std::vector<double>& dist);

class NoFiniteRatio : public Error {
 public:
  using Error::Error;
};

// Grid search over action pairs (a, b), a < b, with weight p on a taken from
// {0, 1/(grid-1), ..., 1}, plus every point mass. Ties go to the lower ratio,
// then the lower first action, then the lower second action, then the lower
// weight. Point masses on zero-regret actions are checked first, so the
// smallest such action wins outright. Throws NoFiniteRatio when every
// distribution has an infinite ratio.
IdsDistribution minimize_info_ratio(const InfoRatioInputs& inputs, std::size_t grid_size = 1001);

// Exact rho and I for the informative-action bandit family with arms
// 0..K, given a posterior over the optimal arm A* in 1..K (posterior[0] is
// ignored and must be 0). Arm a >= 1 pays 1 iff a = A*; arm 0 pays 1/(2 A*).
InfoRatioInputs exact_bandit_rho_info(const std::vector<double>& posterior);

// Shannon entropy in bits, skipping zero entries.
double entropy_bits(const std::vector<double>& p);

}  // namespace psrl
