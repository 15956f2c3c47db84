#pragma once

#include <vector>

#include "psrl/core/rng.hpp"

namespace psrl {

// Marsaglia-Tsang gamma draw with unit scale; shape must be positive.
double sample_gamma(Rng& rng, double shape);
// log of a Gamma(shape, 1) draw, stable for shapes far below 1.
double sample_log_gamma(Rng& rng, double shape);
double sample_beta(Rng& rng, double alpha, double beta);
// Normalized Dirichlet draw; components sum to 1 up to rounding.
std::vector<double> sample_dirichlet(Rng& rng, const std::vector<double>& concentration);
double sample_standard_normal(Rng& rng);

}  // namespace psrl
