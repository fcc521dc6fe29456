#include "criteria.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>

#include "gencert/bounds.hpp"
#include "gencert/constructions.hpp"
#include "gencert/divergence.hpp"
#include "gencert/extended_real.hpp"
#include "gencert/langevin.hpp"
#include "gencert/linreg.hpp"
#include "gencert/markov.hpp"
#include "gencert/mlp.hpp"
#include "gencert/rng.hpp"
#include "gencert/sampling.hpp"
#include "gencert/sgld.hpp"
#include "gencert/stationary.hpp"

namespace acceptance {

using namespace gencert;

namespace {

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

constexpr std::uint64_t kSeed = 20261014;

FiniteDistribution sub_support(const FiniteDistribution& q, Rng& rng) {
  std::vector<double> w(q.size(), 0.0);
  for (auto i : q.support())
    if (!rng.bernoulli(0.2)) w[i] = rng.exponential();
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[q.support().front()] = 1.0;
  return FiniteDistribution::normalized(w);
}

Outcome gibbs_identity() {
  double worst_kl = 0, worst_dinf = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    Rng rng(derive_seed(kSeed, t));
    const std::size_t n = 2 + rng.below(49);
    const auto q = random_distribution(n, rng, 0.2);
    const auto psi = random_potential(n, rng, 5.0);
    const auto p = gibbs_from_potential(q, psi).distribution();
    const auto r = symmetric_identity(p, q, psi, sub_support(q, rng), sub_support(q, rng));
    worst_kl = std::max(worst_kl, std::abs(r.kl_lhs - r.kl_rhs));
    worst_dinf = std::max(worst_dinf, std::abs(r.dinf_lhs - r.dinf_rhs));
  }
  return {worst_kl <= 1e-10 && worst_dinf <= 1e-10, fmt("max |lhs-rhs| KL %.2e, Dinf %.2e", worst_kl, worst_dinf)};
}

Outcome second_law() {
  double worst_kl = -kInf, worst_dinf = -kInf, worst_res = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    Rng rng(derive_seed(kSeed + 1, t));
    const std::size_t n = 2 + rng.below(19);
    const auto k = random_kernel(n, rng, 0.3);
    const auto st = stationary(k);
    worst_res = std::max(worst_res, stationarity_residual(st.pi, k));
    const auto p0 = random_distribution(n, rng, 0.3);
    worst_kl = std::max(worst_kl, verify_second_law(divergence_trace(p0, k, st.pi, DivergenceKind::KL, 100)));
    worst_dinf = std::max(worst_dinf, verify_second_law(divergence_trace(p0, k, st.pi, DivergenceKind::RenyiInf, 100)));
  }
  return {worst_kl <= 1e-12 && worst_dinf <= 1e-12,
          fmt("max step increase KL %.2e, Dinf %.2e (pi residual %.1e)", worst_kl, worst_dinf, worst_res)};
}

Outcome corollary() {
  double worst_kl = kInf, worst_dinf = kInf;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(derive_seed(kSeed + 2, t));
    const std::size_t n = 2 + rng.below(29);
    const auto nu = random_distribution(n, rng, 0.2);
    const auto gibbs = gibbs_from_potential(nu, random_potential(n, rng, 5.0));
    const auto k = metropolis_kernel(gibbs.distribution(), random_symmetric_proposal(n, rng));
    const auto p0 = sub_support(nu, rng);
    for (const auto& s : corollary_bound_check(p0, nu, gibbs, k, 100)) {
      worst_kl = std::min(worst_kl, s.slack_kl);
      worst_dinf = std::min(worst_dinf, s.slack_dinf);
    }
  }
  return {worst_kl >= -1e-10 && worst_dinf >= -1e-10, fmt("min slack KL %.3e, Dinf %.3e", worst_kl, worst_dinf)};
}

Outcome counterexample() {
  const auto r = counterexample_run(1000, kSeed);
  const double kl_err = std::abs(r.kl_stationary_from_init - std::log(2.0));
  const bool ok = r.memorizer_gap == 0.5 && kl_err <= 1e-12 && !r.reverse_divergence_finite;
  return {ok, fmt("memorizer gap %.17g, |KL - ln 2| %.1e, reverse divergence %s", r.memorizer_gap, kl_err,
                  r.reverse_divergence_finite ? "finite" : "infinite")};
}

LangevinSystem quadratic_box(double beta, const Diffusion& diff) {
  LangevinSystem s;
  s.dim = 1;
  s.loss = [](const double* x) { return 2 * x[0] * x[0]; };
  s.grad = [](const double* x, double* g) { g[0] = 4 * x[0]; };
  s.beta = beta;
  s.box = BoxDomain::cube(1, -1, 1);
  s.diffusion = diff;
  return s;
}

IntegratorConfig box_run(std::uint64_t seed) {
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_traj = 10000;
  cfg.steps = 12000;
  cfg.burn_in = 2000;
  cfg.thin = 100;
  cfg.seed = seed;
  return cfg;
}

Outcome langevin_box() {
  const auto sys = quadratic_box(4.0, {});
  const auto s = simulate_ensemble(sys, uniform_box_init(*sys.box), box_run(kSeed + 3));
  // Oracle: Simpson quadrature of exp(-beta L) within each bin, normalized.
  const auto cmp =
      compare_density(histogram(s, *sys.box, 50), [](const double* x) { return std::exp(-8.0 * x[0] * x[0]); },
                      *sys.box, 50, s.rows);
  return {s.rows == 1000000 && cmp.tv <= 0.02, fmt("%zu draws, TV %.4f (limit 0.02)", s.rows, cmp.tv)};
}

Outcome variable_diffusion() {
  struct Case {
    const char* name;
    NoiseKind nk;
    DiffusionKind dk;
    double alpha;
  };
  const Case cases[] = {{"linear", NoiseKind::Linear, DiffusionKind::Linear, 0.5},
                        {"poly", NoiseKind::Poly, DiffusionKind::Poly, 0.5},
                        {"exp", NoiseKind::Exp, DiffusionKind::Exp, 1.0}};
  bool ok = true;
  std::string detail;
  std::uint64_t i = 0;
  for (const auto& c : cases) {
    const NoiseScaleParams np{c.nk, c.alpha, 2, 4.0};
    Diffusion diff;
    diff.kind = c.dk;
    diff.alpha = c.alpha;
    diff.k = 2;
    const Loss1D loss{[](double x) { return 2 * x * x; }, [](double x) { return 4 * x; }};
    const auto exact = analytic_density_1d(np, loss.value, -1, 1, 2001);
    const auto quad = stationary_density_1d(
        loss, [&](double x) { return noise_sigma2(np, 2 * x * x); }, 4.0, -1, 1, 2001);
    double rel = 0;
    for (std::size_t j = 0; j < exact.x.size(); ++j) rel = std::max(rel, std::abs(quad.p[j] - exact.p[j]) / exact.p[j]);

    const auto sys = quadratic_box(4.0, diff);
    const auto s = simulate_ensemble(sys, uniform_box_init(*sys.box), box_run(kSeed + 10 + i++));
    const auto masses =
        bin_masses([&](const double* x) { return std::exp(-potential(np, 2 * x[0] * x[0])); }, *sys.box, 50);
    const double tv = compare_masses(histogram(s, *sys.box, 50), masses, s.rows).tv;
    ok = ok && tv <= 0.03 && rel <= 1e-6;
    detail += fmt("%s TV %.4f quad rel %.1e; ", c.name, tv, rel);
  }
  return {ok, detail};
}

Outcome linreg_closed_forms() {
  int bad = 0;
  double worst_z = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    Rng rng(derive_seed(kSeed + 4, t));
    const std::size_t d = 1 + rng.below(20);
    const std::size_t n = d + 10 + rng.below(500 - d - 9);
    const double sigma = rng.uniform(0.1, 1.5), lambda = rng.uniform(0.1, 2.0) * static_cast<double>(d);
    const double beta = std::exp(rng.uniform(std::log(5.0), std::log(2000.0)));
    const auto p = generate_problem(n, d, sigma, lambda, beta, derive_seed(kSeed + 5, t));
    const auto cf = closed_form_losses(p);
    const auto mc = mc_losses(p, 100000, derive_seed(kSeed + 6, t));
    const double zt = std::abs(cf.train - mc.train) / mc.se_train, zp = std::abs(cf.pop - mc.pop) / mc.se_pop;
    worst_z = std::max({worst_z, zt, zp});
    bad += (zt > 3) + (zp > 3);
  }
  const auto p = generate_problem(200, 5, 0.5, 5.0, 100.0, kSeed + 7);
  SdeOracleConfig sc;
  sc.seed = kSeed + 8;
  const auto so = sde_oracle_losses(p, sc);
  const auto cf = closed_form_losses(p);
  const double rt = std::abs(so.train / cf.train - 1), rp = std::abs(so.pop / cf.pop - 1);
  return {bad == 0 && rt <= 0.05 && rp <= 0.05,
          fmt("MC: %d of 40 beyond 3 se (max %.2f se); SDE rel err train %.2e pop %.2e", bad, worst_z, rt, rp)};
}

Outcome linreg_asymptotics() {
  const std::size_t d = 20, n = 20000;
  const double beta = 2000, sigma = 1;
  double tr = 0, po = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto p = generate_problem(n, d, sigma, static_cast<double>(d), beta, derive_seed(kSeed + 9, t));
    const auto cf = closed_form_losses(p);
    tr += cf.train / 50;
    po += cf.pop / 50;
  }
  const auto as = asymptotic_losses(d, beta, sigma, n);
  const double rt = std::abs(tr / 0.50450 - 1), rp = std::abs(po / as.pop - 1);
  const double rt_formula = std::abs(as.train / 0.50450 - 1);
  return {rt <= 0.05 && rp <= 0.05 && rt_formula <= 1e-12,
          fmt("train %.6f vs 0.50450 (rel %.1e), pop %.6f vs %.6f (rel %.1e)", tr, rt, po, as.pop, rp)};
}

Outcome bound_calculators() {
  int fails = 0;
  auto near = [&](double got, double want) {
    if (!(std::abs(got - want) <= 1e-9)) ++fails;
  };
  const double l100 = std::log(100.0);
  near(gap_bound_mean({1000, 0.01, 0, 0, 1, 0}), std::sqrt((1 + l100) / 1000));
  near(gap_bound_single({4000, 0.05, 0, std::log(2.0), 0, 2}), std::sqrt((std::log(2.0) + 2 + std::log(20.0)) / 4000));
  near(cld_bound(BoundMode::Mean, 0, 0.7, 500, 0.05), std::sqrt(std::log(20.0) / 1000));
  near(cld_bound(BoundMode::Mean, 1600, 0.693, 4000, 0.01), std::sqrt((1108.8 + l100) / 8000));
  near(restricted_box_bound(BoundMode::Mean, 0, 0.3, 4, 1, 100, 0.1), std::sqrt((std::log(4.0) + std::log(10.0)) / 200));
  const double l0[1] = {2}, l1[1] = {1};
  near(gaussian_mismatch_kl(l0, l1, 1), 0.5 * (0.5 - 1 + std::log(2.0)));
  near(binary_kl(0.0, 0.5), std::log(2.0));
  near(binary_kl(0.1, 0.3), 0.1 * std::log(1.0 / 3) + 0.9 * std::log(0.9 / 0.7));
  near(invert_binary_kl_upper(0.2, 0), 0.2);
  near(invert_binary_kl_upper(0, 0.3), 1 - std::exp(-0.3));
  near(kl_form_bounds(BoundMode::Mean, 1, 0.02, 10000, 0.01).kl_budget_per_sample, (1 + std::log(2e4)) / 10000);
  near(kl_form_bounds(BoundMode::Mean, 1, 0.0, 10000, 0.01).fast_gap_bound, 2 * (1 + std::log(2e4)) / 10000);
  near(certificate({1000, 0.01, 0, 0, 0, 0}).bound_mean, std::sqrt(l100 / 1000));
  const int arith_fails = fails;

  // b -> kl(a || b) -> b', plus kl(a || b') = c wherever b' stays clear of 1
  // (closer than that the root is not representable in double).
  double worst_rt = 0, worst_c = 0;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const double a = 0.99 * i / 99.0, b = a + (1 - a) * (j + 0.5) / 100.0;
      worst_rt = std::max(worst_rt, std::abs(invert_binary_kl_upper(a, binary_kl(a, b)) - b));
      const double c = 1e-4 * std::pow(1e4, j / 99.0), bc = invert_binary_kl_upper(a, c);
      if (bc < 1.0 - 1e-6) worst_c = std::max(worst_c, std::abs(binary_kl(a, bc) - c));
    }

  int viol = 0;
  for (int i = 0; i < 100; ++i) {
    double prev_b = -1, prev_n = kInf, prev_k = -1, prev_inv = -1;
    for (int j = 0; j < 100; ++j) {
      const double v = cld_bound(BoundMode::Mean, 20.0 * j, 0.01 + 0.02 * i, 1000, 0.01);
      viol += v <= prev_b;
      prev_b = v;
      const double w = gap_bound_mean({10.0 + 50.0 * j, 0.01, 0.1 * i, 0, 0.5, 0});
      viol += w >= prev_n;
      prev_n = w;
      const double a = 0.005 * i, b = a + (1 - a) * (j + 1) / 101.0;
      const double k = binary_kl(a, b);
      viol += k <= prev_k;
      prev_k = k;
      const double inv = invert_binary_kl_upper(a, 1e-3 * (j + 1));
      viol += inv < prev_inv;
      prev_inv = inv;
    }
  }
  return {arith_fails == 0 && worst_rt <= 1e-9 && worst_c <= 1e-9 && viol == 0,
          fmt("%d arithmetic mismatches, round-trip |db| %.1e |dkl| %.1e, %d monotonicity violations", arith_fails,
              worst_rt, worst_c, viol)};
}

Outcome parity() {
  const std::size_t n = 4000;
  const std::vector<std::size_t> dims{16, 64, 64, 1};
  const auto [train, test] = parity_dataset(16, 3, n, 2000, kSeed);
  const std::vector<std::pair<std::string, double>> betas{{"0.15N", 0.15 * n}, {"0.4N", 0.4 * n}, {"0.5N", 0.5 * n},
                                                          {"0.6N", 0.6 * n},   {"0.7N", 0.7 * n}, {"2N", 2.0 * n},
                                                          {"inf", kInf}};
  const int seeds = 5;
  bool inf_fits = true, formula = true, joint = false;
  std::map<std::string, double> gap;
  std::string joint_at, table;
  for (const auto& [label, beta] : betas) {
    double tr = 0, bd = 0, g = 0, inf_worst = 0;
    for (int s = 0; s < seeds; ++s) {
      TrainConfig cfg;
      cfg.beta = beta;
      cfg.epochs = 300;
      cfg.seed = derive_seed(kSeed, 1000 + s);
      const auto r = train_and_certify(dims, train, test, cfg);
      const double want = cld_bound(BoundMode::Mean, beta, r.init_loss, static_cast<double>(n), cfg.delta);
      formula = formula && (r.bound == want || (std::isinf(want) && std::isinf(r.bound)));
      tr += r.train_error / seeds;
      bd += r.bound / seeds;
      g += r.gap / seeds;
      inf_worst = std::max(inf_worst, r.train_error);
    }
    gap[label] = g;
    if (std::isinf(beta)) inf_fits = inf_worst <= 0.02;
    if (tr <= 0.25 && tr + bd < 0.5 && !joint) {
      joint = true;
      joint_at = label;
    }
    table += fmt("%s: train %.4f bound %.4f; ", label.c_str(), tr, bd);
    std::printf("    parity %-6s train %.5f gap %+.5f bound %.5f\n", label.c_str(), tr, g, bd);
    std::fflush(stdout);
  }
  const bool gap_ok = gap["2N"] <= gap["inf"];
  return {inf_fits && formula && joint && gap_ok,
          fmt("(i) %s (ii) %s (iii) %s%s (iv) gap 2N %.4f <= inf %.4f", inf_fits ? "ok" : "FAIL", formula ? "ok" : "FAIL",
              joint ? "ok at " : "FAIL", joint_at.c_str(), gap["2N"], gap["inf"])};
}

Outcome shattering() {
  ShatterSpec s;
  s.m = 36;
  s.l_amp = 8;
  Rng rng(kSeed);
  for (int i = 0; i < 36; ++i) s.labels.push_back(rng.bernoulli(0.5));
  const double formula = 1296.0 / (72.0 * std::sqrt(71.0));
  const double analytic = shattering_analytic_output(36, 8);
  int shattered = 0;
  double worst_out = 0;
  bool audit = true;
  for (unsigned mask = 0; mask < 1024; ++mask) {
    for (int i = 0; i < 10; ++i) s.labels[i] = (mask >> i) & 1u;
    const auto net = build_shattering_net(s);
    const auto c = verify_shattering(net, s);
    shattered += c.margin_ok;
    audit = audit && audit_weight_bounds(net).ok;
    for (int i = 0; i < 36; ++i)
      worst_out = std::max(worst_out, std::abs(c.outputs[i] - (s.labels[i] ? analytic : 0.0)));
  }
  ShatterSpec m16;
  m16.m = 16;
  m16.labels.assign(16, 1);
  m16.l_amp = 8;
  const bool fails8 = !verify_shattering(build_shattering_net(m16), m16).margin_ok;
  m16.l_amp = 12;
  const bool passes12 = verify_shattering(build_shattering_net(m16), m16).margin_ok;
  const bool ok = std::abs(analytic - formula) <= 1e-9 && worst_out <= 1e-9 && shattered == 1024 && audit && fails8 &&
                  passes12;
  return {ok, fmt("output %.9f (1296/(72 sqrt 71) = %.9f), %d/1024 labelings, audit %s, m=16: L8 %s, L12 %s", analytic,
                  formula, shattered, audit ? "ok" : "FAIL", fails8 ? "fails" : "PASSES", passes12 ? "passes" : "FAILS")};
}

Outcome gradient_check() {
  const auto ds = parity_dataset(16, 3, 256, 0, kSeed).first;
  auto net = init_mlp({16, 64, 64, 1}, kSeed, BiasInit::Gaussian);
  std::vector<double> grad;
  mlp_loss_grad(net, ds.batch(), {}, grad);
  Rng rng(kSeed);
  double worst = 0;
  for (int probe = 0; probe < 20; ++probe) {
    const std::size_t i = rng.below(net.num_params());
    const double keep = net.flat()[i], h = 1e-5;
    net.flat()[i] = keep + h;
    const double up = mlp_forward(net, ds.batch()).logistic_loss;
    net.flat()[i] = keep - h;
    const double dn = mlp_forward(net, ds.batch()).logistic_loss;
    net.flat()[i] = keep;
    const double fd = (up - dn) / (2 * h);
    worst = std::max(worst, std::abs(grad[i] - fd) / std::max(std::abs(fd), 1e-8));
  }
  return {worst <= 1e-4, fmt("max relative error %.2e over 20 probes", worst)};
}

}  // namespace

const std::vector<Criterion>& all_criteria() {
  static const std::vector<Criterion> c{
      {1, "Gibbs symmetric identity", 5, gibbs_identity},
      {2, "generalized second law", 10, second_law},
      {3, "corollary slack on Metropolis chains", 30, corollary},
      {4, "memorization counterexample", 1, counterexample},
      {5, "reflected Langevin vs Gibbs", 120, langevin_box},
      {6, "variable-diffusion stationarity", 360, variable_diffusion},
      {7, "ridge closed forms vs MC and SDE", 180, linreg_closed_forms},
      {8, "ridge asymptotics", 120, linreg_asymptotics},
      {9, "bound calculators", 5, bound_calculators},
      {10, "parity certification", 900, parity},
      {11, "shattering construction", 30, shattering},
      {12, "MLP gradient check", 5, gradient_check},
  };
  return c;
}

}  // namespace acceptance
