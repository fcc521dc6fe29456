#include <cmath>
#include <cstring>

#include "doctest.h"
#include "gencert/error.hpp"
#include "gencert/extended_real.hpp"
#include "gencert/langevin.hpp"
#include "gencert/rng.hpp"

using namespace gencert;
using doctest::Approx;

namespace {
LangevinSystem quad_box(double beta) {
  LangevinSystem s;
  s.dim = 1;
  s.loss = [](const double* x) { return 2 * x[0] * x[0]; };
  s.grad = [](const double* x, double* g) { g[0] = 4 * x[0]; };
  s.beta = beta;
  s.box = BoxDomain::cube(1, -1, 1);
  return s;
}
}  // namespace

TEST_CASE("reflect_into_box") {
  const auto box = BoxDomain::cube(1, 0, 1);
  CHECK(reflect_into_box({1.2}, box)[0] == Approx(0.8));
  CHECK(reflect_into_box({-0.3}, box)[0] == Approx(0.3));
  CHECK(reflect_into_box({2.5}, box)[0] == Approx(0.5));
  CHECK(reflect_into_box({0.4}, box)[0] == 0.4);
  BoxDomain b2{{0, -2}, {1, 2}};
  const auto r = reflect_into_box({-0.25, 5.0}, b2);
  CHECK(r[0] == Approx(0.25));
  CHECK(r[1] == Approx(-1.0));
  CHECK_THROWS_AS(validate(BoxDomain{{1}, {0}}), ValidationError);
}

TEST_CASE("step with noise off and zero gradient is the identity") {
  LangevinSystem s;
  s.dim = 2;
  s.loss = [](const double*) { return 0.0; };
  s.grad = [](const double*, double* g) { g[0] = g[1] = 0.0; };
  s.beta = kInf;
  Rng rng(1);
  const auto t = step(s, {0.3, -1.2}, 0.01, rng);
  CHECK(t[0] == 0.3);
  CHECK(t[1] == -1.2);
}

TEST_CASE("gradient consistency detects a wrong gradient") {
  auto s = quad_box(4.0);
  CHECK(gradient_consistency(s, 20, 3) < 1e-6);
  s.grad = [](const double* x, double* g) { g[0] = 3 * x[0]; };
  CHECK(gradient_consistency(s, 20, 3) > 0.1);
}

TEST_CASE("ensemble bookkeeping and determinism") {
  const auto s = quad_box(4.0);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.steps = 200;
  cfg.burn_in = 200;
  cfg.thin = 10;
  cfg.n_traj = 5;
  CHECK(simulate_ensemble(s, uniform_box_init(*s.box), cfg).rows == 0);
  cfg.burn_in = 50;
  cfg.n_traj = 700;
  const auto a = simulate_ensemble(s, uniform_box_init(*s.box), cfg);
  CHECK(a.rows == 700 * 15);
  cfg.workers = 3;
  cfg.chunk = 64;
  const auto b = simulate_ensemble(s, uniform_box_init(*s.box), cfg);
  REQUIRE(a.data.size() == b.data.size());
  CHECK(std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0);
  for (double v : a.data) CHECK((v >= -1 && v <= 1));
  cfg.seed = 1;
  CHECK(simulate_ensemble(s, uniform_box_init(*s.box), cfg).data != a.data);
}

TEST_CASE("diverging trajectories are reported") {
  LangevinSystem s;
  s.dim = 1;
  s.loss = [](const double* x) { return -x[0] * x[0]; };
  s.grad = [](const double* x, double* g) { g[0] = -1e6 * x[0]; };
  s.beta = 1.0;
  IntegratorConfig cfg;
  cfg.dt = 0.1;
  cfg.steps = 500;
  cfg.n_traj = 4;
  CHECK_THROWS_AS(simulate_ensemble(s, point_init({1.0}), cfg), TrajectoryDivergence);
}

TEST_CASE("histogram and density comparison") {
  const auto box = BoxDomain::cube(1, 0, 1);
  SampleSet one{1, 4, {0.51, 0.52, 0.55, 0.59}};
  const auto h = histogram(one, box, 10);
  CHECK(h[5] == 1.0);
  SampleSet out{1, 1, {1.5}};
  CHECK_THROWS_AS(histogram(out, box, 10), NumericalError);

  const auto masses = bin_masses([](const double* x) { return std::exp(-x[0]); }, box, 5);
  const double z = 1 - std::exp(-1.0);
  for (int b = 0; b < 5; ++b) CHECK(masses[b] == Approx((std::exp(-0.2 * b) - std::exp(-0.2 * (b + 1))) / z).epsilon(1e-10));
  CHECK(compare_masses(masses, masses, 1000).tv == Approx(0.0).scale(1));
  CHECK(compare_masses(FiniteDistribution::indicator(2, 0), FiniteDistribution::indicator(2, 1), 100).tv == 1.0);

  // uniform draws give a near-uniform histogram: chi-square below the 0.001 quantile for 49 dof (85.35)
  Rng rng(8);
  SampleSet u{1, 100000, {}};
  for (std::size_t i = 0; i < u.rows; ++i) u.data.push_back(rng.uniform());
  const auto hu = histogram(u, box, 50);
  double chi = 0;
  for (std::size_t b = 0; b < 50; ++b) {
    const double e = u.rows / 50.0;
    chi += std::pow(hu[b] * u.rows - e, 2) / e;
  }
  CHECK(chi < 85.35);
}

TEST_CASE("zero drift in a box samples the uniform law") {
  LangevinSystem s;
  s.dim = 1;
  s.loss = [](const double*) { return 0.0; };
  s.grad = [](const double*, double* g) { g[0] = 0.0; };
  s.beta = 0.5;
  s.box = BoxDomain::cube(1, -1, 1);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.steps = 4000;
  cfg.burn_in = 2000;
  cfg.thin = 20;
  cfg.n_traj = 10000;
  const auto samp = simulate_ensemble(s, point_init({0.9}), cfg);
  REQUIRE(samp.rows == 1000000);
  const auto cmp = compare_density(histogram(samp, *s.box, 50), [](const double*) { return 1.0; }, *s.box, 50, samp.rows);
  CHECK(cmp.tv <= 0.01);
}

TEST_CASE("variable diffusion needs the loss value") {
  Diffusion d;
  d.kind = DiffusionKind::Linear;
  d.alpha = 0.5;
  CHECK(d.needs_loss());
  CHECK(d.sigma2(1.0, nullptr) == Approx(1.5));
  d.kind = DiffusionKind::Exp;
  CHECK(d.sigma2(2.0, nullptr) == Approx(std::exp(1.0)));
}
