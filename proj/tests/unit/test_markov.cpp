#include <cmath>

#include "doctest.h"
#include "gencert/error.hpp"
#include "gencert/markov.hpp"
#include "gencert/sampling.hpp"

using namespace gencert;
using doctest::Approx;

namespace {
FiniteDistribution fd(std::vector<double> v) { return FiniteDistribution(std::move(v)); }

// Power iteration on a lazy copy of K; slow but independent of the solver.
FiniteDistribution power_pi(const TransitionKernel& k) {
  const std::size_t n = k.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n)), nx(n);
  for (int it = 0; it < 20000; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.5 * p[j];
      for (std::size_t i = 0; i < n; ++i) s += 0.5 * p[i] * k(i, j);
      nx[j] = s;
    }
    p.swap(nx);
  }
  return FiniteDistribution::normalized(p);
}
}  // namespace

TEST_CASE("kernel validation") {
  CHECK_THROWS_AS(TransitionKernel(2, {0.5, 0.6, 0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(TransitionKernel(2, {1, 0, 0}), ValidationError);
  CHECK_NOTHROW(TransitionKernel::from_rows({{0.1, 0.9}, {1, 0}}));
}

TEST_CASE("evolve examples") {
  const auto p0 = fd({0.2, 0.3, 0.5});
  for (const auto& p : evolve(p0, TransitionKernel::identity(3), 5)) CHECK(max_abs_diff(p, p0) == 0.0);
  const auto ds = TransitionKernel::from_rows({{0.2, 0.5, 0.3}, {0.5, 0.2, 0.3}, {0.3, 0.3, 0.4}});
  for (const auto& p : evolve(FiniteDistribution::uniform(3), ds, 10))
    CHECK(max_abs_diff(p, FiniteDistribution::uniform(3)) < 1e-15);
  const auto swap = TransitionKernel::from_rows({{0, 1}, {1, 0}});
  const auto tr = evolve(fd({1, 0}), swap, 2);
  REQUIRE(tr.size() == 3);
  CHECK(tr[1][1] == 1.0);
  CHECK(tr[2][0] == 1.0);
}

TEST_CASE("stationary solver") {
  const auto ds = TransitionKernel::from_rows({{0.2, 0.5, 0.3}, {0.5, 0.2, 0.3}, {0.3, 0.3, 0.4}});
  const auto s = stationary(ds);
  CHECK(s.unique);
  CHECK(max_abs_diff(s.pi, FiniteDistribution::uniform(3)) < 1e-12);
  CHECK_FALSE(stationary(TransitionKernel::identity(2)).unique);
  // Periodic but irreducible: the stationary law is still unique.
  const auto sw = stationary(TransitionKernel::from_rows({{0, 1}, {1, 0}}));
  CHECK(sw.unique);
  CHECK(sw.pi[0] == Approx(0.5));

  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto k = random_kernel(3, rng);
    const auto st = stationary(k);
    CHECK(st.unique);
    CHECK(stationarity_residual(st.pi, k) < 1e-10);
    CHECK(max_abs_diff(st.pi, power_pi(k)) < 1e-10);
  }
}

TEST_CASE("divergence traces and the second law") {
  Rng rng(12);
  const auto k = random_kernel(6, rng);
  const auto pi = stationary(k).pi;
  const auto at_pi = divergence_trace(pi, k, pi, DivergenceKind::KL, 20);
  for (double v : at_pi.values) CHECK(std::abs(v) < 1e-12);
  const auto frozen = divergence_trace(fd({0.5, 0.5}), TransitionKernel::identity(2), fd({0.25, 0.75}),
                                       DivergenceKind::RenyiInf, 10);
  for (double v : frozen.values) CHECK(v == frozen.values[0]);
  CHECK(verify_second_law(frozen) == 0.0);
  CHECK_THROWS(divergence_trace(fd({0.5, 0.5}), TransitionKernel::from_rows({{0.9, 0.1}, {0.5, 0.5}}),
                                fd({0.5, 0.5}), DivergenceKind::KL, 3));

  double worst = -kInf;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.below(19);
    const auto kk = random_kernel(n, rng, 0.3);
    const auto st = stationary(kk);
    const auto p0 = random_distribution(n, rng, 0.3);
    for (auto kind : {DivergenceKind::KL, DivergenceKind::RenyiInf})
      worst = std::max(worst, verify_second_law(divergence_trace(p0, kk, st.pi, kind, 60)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("corollary slack") {
  Rng rng(13);
  const std::size_t n = 7;
  const auto nu = random_distribution(n, rng);
  const auto gibbs = gibbs_from_potential(nu, random_potential(n, rng, 5.0));
  const auto k = metropolis_kernel(gibbs.distribution(), ring_proposal(n));
  CHECK(stationarity_residual(gibbs.distribution(), k) < 1e-14);

  const auto from_stat = corollary_bound_check(gibbs.distribution(), nu, gibbs, k, 30);
  for (const auto& s : from_stat) {
    CHECK(s.slack_kl >= -1e-12);
    CHECK(s.slack_kl == Approx(from_stat.front().slack_kl).epsilon(1e-12));
  }
  const auto zero_psi = gibbs_from_potential(nu, std::vector<double>(n, 0.0));
  const auto kz = metropolis_kernel(nu, random_symmetric_proposal(n, rng));
  const auto p0 = random_distribution(n, rng);
  const auto sl = corollary_bound_check(p0, nu, zero_psi, kz, 40);
  for (const auto& s : sl) {
    const auto pt = evolve(p0, kz, s.t).back();
    CHECK(s.slack_kl == Approx(kl(p0, nu) - kl(pt, nu)).epsilon(1e-10));
    CHECK(s.slack_kl >= -1e-10);
    CHECK(s.slack_dinf >= -1e-10);
  }
}

TEST_CASE("data processing inequality") {
  const std::vector<double> j{0.1, 0.2, 0.3, 0.4};
  const auto same = verify_dpi(j, j, 2, 2);
  CHECK(same.kl_joint == 0.0);
  CHECK(same.kl_marginal == 0.0);
  // p = pX (x) pY, q = qX (x) pY
  const double px[2] = {0.3, 0.7}, qx[2] = {0.6, 0.4}, py[3] = {0.2, 0.5, 0.3};
  std::vector<double> jp, jq;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 3; ++k) {
      jp.push_back(px[i] * py[k]);
      jq.push_back(qx[i] * py[k]);
    }
  const auto prod = verify_dpi(jp, jq, 2, 3);
  CHECK(prod.kl_joint == Approx(prod.kl_marginal).epsilon(1e-13));

  Rng rng(14);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.below(10), m = 1 + rng.below(10);
    const auto a = random_distribution(n * m, rng), b = random_distribution(n * m, rng);
    const auto r = verify_dpi(a.probs(), b.probs(), n, m);
    CHECK(r.kl_marginal <= r.kl_joint + 1e-12);
  }
}
