#pragma once

#include <cstddef>
#include <vector>

#include "gencert/divergence.hpp"

namespace gencert {

// Row-stochastic n x n matrix, K(i, j) = P(next = j | current = i).
class TransitionKernel {
 public:
  TransitionKernel() = default;
  TransitionKernel(std::size_t n, std::vector<double> row_major);
  static TransitionKernel from_rows(const std::vector<std::vector<double>>& rows);
  static TransitionKernel identity(std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return k_[i * n_ + j]; }
  const std::vector<double>& data() const { return k_; }

  // p K
  FiniteDistribution apply(const FiniteDistribution& p) const;
  // this * other (run this kernel, then other)
  TransitionKernel then(const TransitionKernel& other) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> k_;
};

std::vector<FiniteDistribution> evolve(const FiniteDistribution& p0, const TransitionKernel& k, std::size_t steps);

struct StationaryResult {
  FiniteDistribution pi;
  bool unique = false;
};

// unique is decided from rank(K^T - I) == n - 1. When the stationary set is
// larger, the minimum-norm solution of [K^T - I; 1^T] x = [0; 1] is returned.
StationaryResult stationary(const TransitionKernel& k);

double stationarity_residual(const FiniteDistribution& pi, const TransitionKernel& k);

struct DivergenceTrace {
  DivergenceKind kind;
  std::vector<double> values;  // values[t] = D(p_t || reference), t = 0..T
  FiniteDistribution reference;
};

DivergenceTrace divergence_trace(const FiniteDistribution& p0, const TransitionKernel& k,
                                 const FiniteDistribution& pi, DivergenceKind kind, std::size_t steps);

// max over t of values[t+1] - values[t], with +inf -> +inf counted as 0.
// Returns -inf for traces shorter than two entries.
double verify_second_law(const DivergenceTrace& trace);

struct CorollarySlack {
  std::size_t t;
  double slack_kl;
  double slack_dinf;
};

std::vector<CorollarySlack> corollary_bound_check(const FiniteDistribution& p0, const FiniteDistribution& nu,
                                                  const GibbsSpec& gibbs, const TransitionKernel& k,
                                                  std::size_t steps);

struct DpiResult {
  double kl_joint;
  double kl_marginal;
};

// Joints are n x m row-major; the marginal is over the row index.
DpiResult verify_dpi(const std::vector<double>& joint_p, const std::vector<double>& joint_q, std::size_t n,
                     std::size_t m);

// Metropolis chain for `target` from a symmetric proposal (row-major n x n,
// rows summing to at most 1; the remainder stays put).
TransitionKernel metropolis_kernel(const FiniteDistribution& target, const std::vector<double>& proposal);
// Nearest-neighbour walk on a ring, probability 1/2 each way (n >= 3), or
// the swap proposal for n = 2.
std::vector<double> ring_proposal(std::size_t n);

}  // namespace gencert
