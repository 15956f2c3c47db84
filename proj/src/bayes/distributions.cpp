#include "psrl/bayes/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace psrl {

double sample_standard_normal(Rng& rng) {
  // Marsaglia polar method; no cached second draw so the stream stays simple.
  while (true) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

namespace {

// Marsaglia-Tsang for shape >= 1, returning log of the draw.
double log_gamma_large(Rng& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = sample_standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d) + std::log(v);
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d) + std::log(v);
  }
}

}  // namespace

double sample_log_gamma(Rng& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw std::invalid_argument("gamma shape must be positive and finite");
  if (shape >= 1.0) return log_gamma_large(rng, shape);
  // Gamma(a) = Gamma(a + 1) * U^(1/a), evaluated in log space.
  const double lg = log_gamma_large(rng, shape + 1.0);
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  return lg + std::log(u) / shape;
}

double sample_gamma(Rng& rng, double shape) { return std::exp(sample_log_gamma(rng, shape)); }

double sample_beta(Rng& rng, double alpha, double beta) {
  const double la = sample_log_gamma(rng, alpha);
  const double lb = sample_log_gamma(rng, beta);
  const double m = std::max(la, lb);
  const double a = std::exp(la - m);
  const double b = std::exp(lb - m);
  return a / (a + b);
}

std::vector<double> sample_dirichlet(Rng& rng, const std::vector<double>& concentration) {
  if (concentration.empty()) throw std::invalid_argument("empty Dirichlet concentration");
  std::vector<double> logs(concentration.size());
  for (std::size_t i = 0; i < concentration.size(); ++i) logs[i] = sample_log_gamma(rng, concentration[i]);
  const double m = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  for (double& l : logs) {
    l = std::exp(l - m);
    total += l;
  }
  for (double& l : logs) l /= total;
  return logs;
}

}  // namespace psrl
