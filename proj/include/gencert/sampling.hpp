#pragma once

#include <cstddef>
#include <vector>

#include "gencert/divergence.hpp"
#include "gencert/markov.hpp"
#include "gencert/rng.hpp"

namespace gencert {

// Flat Dirichlet draw. Each state is dropped with probability zero_prob
// (at least one state is always kept).
FiniteDistribution random_distribution(std::size_t n, Rng& rng, double zero_prob = 0.0);

// Random potential with entries uniform in [0, max_value].
PotentialVector random_potential(std::size_t n, Rng& rng, double max_value);

// Rows drawn like random_distribution(n, rng, zero_prob).
TransitionKernel random_kernel(std::size_t n, Rng& rng, double zero_prob = 0.0);

// Symmetric proposal with random off-diagonal weights, scaled so the
// largest row sum is at most 1.
std::vector<double> random_symmetric_proposal(std::size_t n, Rng& rng);

}  // namespace gencert
