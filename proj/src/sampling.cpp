#include "gencert/sampling.hpp"

#include <algorithm>

#include "gencert/error.hpp"

namespace gencert {

FiniteDistribution random_distribution(std::size_t n, Rng& rng, double zero_prob) {
  require(n > 0, "need n > 0");
  std::vector<double> w(n);
  bool any = false;
  for (auto& v : w) {
    v = rng.bernoulli(zero_prob) ? 0.0 : rng.exponential();
    any = any || v > 0.0;
  }
  if (!any) w[rng.below(n)] = 1.0;
  return FiniteDistribution::normalized(std::move(w));
}

PotentialVector random_potential(std::size_t n, Rng& rng, double max_value) {
  PotentialVector psi(n);
  for (auto& v : psi) v = rng.uniform(0.0, max_value);
  return psi;
}

TransitionKernel random_kernel(std::size_t n, Rng& rng, double zero_prob) {
  std::vector<double> k;
  k.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = random_distribution(n, rng, zero_prob);
    k.insert(k.end(), row.probs().begin(), row.probs().end());
  }
  return TransitionKernel(n, std::move(k));
}

std::vector<double> random_symmetric_proposal(std::size_t n, Rng& rng) {
  std::vector<double> q(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) q[i * n + j] = q[j * n + i] = rng.uniform();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += q[i * n + j];
    worst = std::max(worst, s);
  }
  if (worst > 0.0)
    for (auto& v : q) v /= worst;
  return q;
}

}  // namespace gencert
