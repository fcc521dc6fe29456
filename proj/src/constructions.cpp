#include "gencert/constructions.hpp"

#include <algorithm>
#include <cmath>

#include "gencert/error.hpp"
#include "gencert/rng.hpp"

namespace gencert {

TransitionKernel counterexample_kernel() {
  // ZERO -> MEM, ONE -> ONE, MEM -> ONE
  return TransitionKernel::from_rows({{0, 0, 1}, {0, 1, 0}, {0, 1, 0}});
}

CounterexampleResult counterexample_run(std::size_t n, std::uint64_t seed) {
  require(n >= 1, "need N >= 1");
  Rng rng(seed);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rng.uniform();  // x_i, irrelevant to the labels
    if (rng.bernoulli(0.5)) ++ones;
  }
  CounterexampleResult r{};
  r.n = n;
  r.ones = ones;
  const double f1 = static_cast<double>(ones) / static_cast<double>(n);
  const double f0 = static_cast<double>(n - ones) / static_cast<double>(n);
  r.empirical_error = {f1, f0, 0.0};
  r.population_error = {0.5, 0.5, 0.5};

  const FiniteDistribution p0({0.5, 0.5, 0.0});
  const auto ps = evolve(p0, counterexample_kernel(), 2);
  for (std::size_t t = 0; t < 3; ++t) {
    r.marginals[t] = ps[t];
    double g = 0.0;
    for (std::size_t s = 0; s < 3; ++s) g += ps[t][s] * (r.population_error[s] - r.empirical_error[s]);
    r.gap_trace[t] = g;
  }
  r.memorizer_gap = r.population_error[kMem] - r.empirical_error[kMem];
  const FiniteDistribution& p_inf = ps[2];
  r.kl_init = kl(p0, p0);
  r.kl_stationary_from_init = kl(p_inf, p0);
  r.reverse_divergence = kl(p0, p_inf);
  r.reverse_divergence_finite = std::isfinite(r.reverse_divergence);
  return r;
}

namespace {

std::size_t exact_sqrt(std::size_t m) {
  auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
  while (s * s > m) --s;
  while ((s + 1) * (s + 1) <= m) ++s;
  return s;
}

}  // namespace

void validate(const ShatterSpec& spec) {
  require(spec.m >= 1, "need m >= 1");
  const std::size_t r = exact_sqrt(spec.m);
  require(r * r == spec.m, "m must be a perfect square");
  require(spec.l_amp >= 1, "need at least one amplification layer");
  require(spec.labels.size() == spec.m, "need one label per point");
  for (int y : spec.labels) require(y == 0 || y == 1, "labels must be 0 or 1");
}

double shattering_analytic_output(std::size_t m, std::size_t l_amp) {
  const double md = static_cast<double>(m);
  return std::pow(md, static_cast<double>(l_amp) / 4.0) / (2.0 * md * std::sqrt(2.0 * md - 1.0));
}

MlpParams build_shattering_net(const ShatterSpec& spec) {
  validate(spec);
  const std::size_t m = spec.m, r = exact_sqrt(m), width = 2 * m - 1;
  std::vector<std::size_t> dims{1, width, 1};
  for (std::size_t i = 0; i < spec.l_amp; ++i) dims.push_back(r);
  dims.push_back(1);
  MlpParams net(dims);

  const double md = static_cast<double>(m);
  const double out_w = 1.0 / std::sqrt(static_cast<double>(width));
  auto x = [md](std::size_t i) { return static_cast<double>(i) / md; };  // 1-based point index

  // Neuron 0: constant y_1 / (2m).
  net.b(0, 0) = spec.labels[0] / (2.0 * md);
  net.w(1, 0, 0) = out_w;
  std::size_t unit = 1;
  for (std::size_t i = 1; i < m; ++i) {
    const int a = spec.labels[i - 1], b = spec.labels[i];
    if (a == b) continue;
    const double sign = b > a ? 1.0 : -1.0;
    // 1/2 [x - x_i]_+ - 1/2 [x - x_{i+1}]_+ rises by 1/(2m) between x_i and x_{i+1}.
    net.w(0, unit, 0) = 0.5;
    net.b(0, unit) = -0.5 * x(i);
    net.w(1, 0, unit) = sign * out_w;
    net.w(0, unit + 1, 0) = 0.5;
    net.b(0, unit + 1) = -0.5 * x(i + 1);
    net.w(1, 0, unit + 1) = -sign * out_w;
    unit += 2;
  }

  const double amp = 1.0 / std::sqrt(static_cast<double>(r));
  for (std::size_t j = 0; j < r; ++j) net.w(2, j, 0) = 1.0;
  for (std::size_t l = 3; l < net.layers(); ++l)
    for (std::size_t o = 0; o < net.fan_out(l); ++o)
      for (std::size_t i = 0; i < net.fan_in(l); ++i) net.w(l, o, i) = amp;
  return net;
}

ShatterCheck verify_shattering(const MlpParams& net, const ShatterSpec& spec) {
  validate(spec);
  ShatterCheck c{{}, true, kInf, -kInf};
  const double tol = 1e-9;
  for (std::size_t i = 1; i <= spec.m; ++i) {
    const double xi = static_cast<double>(i) / static_cast<double>(spec.m);
    const double out = mlp_output(net, &xi);
    c.outputs.push_back(out);
    if (spec.labels[i - 1] == 1) {
      c.min_positive = std::min(c.min_positive, out);
      if (out < 2.0 - tol) c.margin_ok = false;
    } else {
      c.max_negative = std::max(c.max_negative, out);
      if (out > 0.0 + tol) c.margin_ok = false;
    }
  }
  return c;
}

WeightAudit audit_weight_bounds(const MlpParams& net) {
  WeightAudit a{true, {}};
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.fan_in(l)));
    const double* w = net.weights(l);
    double mx = 0.0;
    for (std::size_t i = 0; i < net.fan_in(l) * net.fan_out(l); ++i) {
      mx = std::max(mx, std::abs(w[i]));
      if (std::abs(w[i]) > bound) a.ok = false;
    }
    a.max_ratio.push_back(mx / bound);
  }
  return a;
}

}  // namespace gencert
