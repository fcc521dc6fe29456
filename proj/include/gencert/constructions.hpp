#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "gencert/divergence.hpp"
#include "gencert/markov.hpp"
#include "gencert/mlp.hpp"

namespace gencert {

// Three-state quotient of the memorization counterexample: the constant-0
// and constant-1 hypotheses and the memorizer of the sample.
enum CounterexampleState : std::size_t { kZero = 0, kOne = 1, kMem = 2 };

struct CounterexampleResult {
  std::size_t n;
  std::size_t ones;  // labels equal to 1 in the sample
  std::array<double, 3> empirical_error;   // E_S per state
  std::array<double, 3> population_error;  // E_D per state, 1/2 each
  std::array<FiniteDistribution, 3> marginals;  // p_0, p_1, p_2
  std::array<double, 3> gap_trace;              // expected E_D - E_S at t = 0, 1, 2
  double memorizer_gap;
  double kl_init;                  // KL(p0 || nu) with nu = p0
  double kl_stationary_from_init;  // KL(p_inf || p0)
  double reverse_divergence;       // KL(p0 || p_inf)
  bool reverse_divergence_finite;
};

TransitionKernel counterexample_kernel();
CounterexampleResult counterexample_run(std::size_t n, std::uint64_t seed);

struct ShatterSpec {
  std::size_t m = 36;
  std::size_t l_amp = 8;
  std::vector<int> labels;  // m entries in {0, 1}
};

void validate(const ShatterSpec& spec);

// Layer widths [1, 2m-1, 1, sqrt(m) x l_amp, 1]. The first hidden layer uses
// slope-1/2 ramps, so a point with label 1 reaches the single layer-2 neuron
// at exactly 1 / (2m sqrt(2m-1)); the amplification layers multiply that by
// m^(l_amp/4).
MlpParams build_shattering_net(const ShatterSpec& spec);

// m^(L/4) / (2 m sqrt(2m - 1))
double shattering_analytic_output(std::size_t m, std::size_t l_amp);

struct ShatterCheck {
  std::vector<double> outputs;
  bool margin_ok;
  double min_positive;  // smallest output over label-1 points (+inf if none)
  double max_negative;  // largest output over label-0 points (-inf if none)
};

// r_i = 1, margin 1: label 0 needs output <= 0, label 1 needs output >= 2
// (both within 1e-9).
ShatterCheck verify_shattering(const MlpParams& net, const ShatterSpec& spec);

struct WeightAudit {
  bool ok;
  std::vector<double> max_ratio;  // per layer: max |w| * sqrt(fan_in)
};

WeightAudit audit_weight_bounds(const MlpParams& net);

}  // namespace gencert
