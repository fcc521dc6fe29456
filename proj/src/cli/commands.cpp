#include <algorithm>
#include <cmath>

#include "gencert/bounds.hpp"
#include "gencert/cli.hpp"
#include "gencert/constructions.hpp"
#include "gencert/error.hpp"
#include "gencert/langevin.hpp"
#include "gencert/linreg.hpp"
#include "gencert/markov.hpp"
#include "gencert/sampling.hpp"
#include "gencert/sgld.hpp"
#include "gencert/simd/kernels.hpp"
#include "gencert/stationary.hpp"

namespace gencert::cli::detail {

namespace {

using io::format_double;
using io::Json;

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::size_t positive(const Params& p, const std::string& k) {
  const std::size_t v = p.size(k);
  require(v > 0, "parameter '" + k + "' must be positive");
  return v;
}

IntegratorConfig integrator_from(const Params& p, std::uint64_t seed) {
  IntegratorConfig cfg;
  cfg.dt = p.real("dt");
  cfg.n_traj = p.size("n-traj");
  cfg.steps = p.size("steps");
  cfg.burn_in = p.size("burn-in");
  cfg.thin = p.size("thin");
  cfg.workers = positive(p, "workers");
  cfg.seed = seed;
  validate(cfg);
  return cfg;
}

NoiseKind noise_kind(const std::string& s) {
  if (s == "unit" || s == "uniform") return NoiseKind::Uniform;
  if (s == "linear") return NoiseKind::Linear;
  if (s == "poly") return NoiseKind::Poly;
  if (s == "exp") return NoiseKind::Exp;
  throw ValidationError("unknown noise kind '" + s + "' (unit | linear | poly | exp)");
}

Diffusion diffusion_for(NoiseKind kind, double alpha, int k) {
  Diffusion d;
  d.alpha = alpha;
  d.k = k;
  switch (kind) {
    case NoiseKind::Uniform: d.kind = DiffusionKind::Unit; break;
    case NoiseKind::Linear: d.kind = DiffusionKind::Linear; break;
    case NoiseKind::Poly: d.kind = DiffusionKind::Poly; break;
    case NoiseKind::Exp: d.kind = DiffusionKind::Exp; break;
  }
  return d;
}

const char* kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::Uniform: return "uniform";
    case NoiseKind::Linear: return "linear";
    case NoiseKind::Poly: return "poly";
    case NoiseKind::Exp: return "exp";
  }
  return "?";
}

LangevinSystem quadratic_box_system(double a, double lo, double hi, double beta, const Diffusion& diff) {
  LangevinSystem sys;
  sys.dim = 1;
  sys.loss = [a](const double* x) { return a * x[0] * x[0]; };
  sys.grad = [a](const double* x, double* g) { g[0] = 2.0 * a * x[0]; };
  sys.beta = beta;
  sys.box = BoxDomain::cube(1, lo, hi);
  sys.diffusion = diff;
  validate(sys);
  return sys;
}

// Total variation between two densities on the same grid, by Simpson.
double grid_tv(const GridDensity& p, const GridDensity& q) {
  const auto w = simpson_weights(p.x.size(), p.h);
  double s = 0.0;
  for (std::size_t i = 0; i < p.x.size(); ++i) s += w[i] * std::abs(p.p[i] - q.p[i]);
  return 0.5 * s;
}

double grid_max_rel(const GridDensity& p, const GridDensity& q) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.x.size(); ++i) m = std::max(m, std::abs(p.p[i] - q.p[i]) / q.p[i]);
  return m;
}

struct BoxSimResult {
  double tv, kl;
  std::size_t kept;
  FiniteDistribution hist, masses;
  SampleSet samples;
};

BoxSimResult simulate_box(const LangevinSystem& sys, const NoiseScaleParams& np, double a,
                          const IntegratorConfig& cfg, std::size_t bins) {
  BoxSimResult r{};
  r.samples = simulate_ensemble(sys, uniform_box_init(*sys.box), cfg);
  require(r.samples.rows > 0, "no draws kept (steps - burn-in < thin)");
  r.kept = r.samples.rows;
  r.hist = histogram(r.samples, *sys.box, bins);
  r.masses = bin_masses([&](const double* x) { return std::exp(-potential(np, a * x[0] * x[0])); }, *sys.box, bins);
  const auto cmp = compare_masses(r.hist, r.masses, r.kept);
  r.tv = cmp.tv;
  r.kl = cmp.kl_discrete;
  return r;
}

// ---------------------------------------------------------------------------

void cmd_second_law(CommandContext& ctx) {
  auto& p = ctx.params;
  const std::size_t n_max = p.size("n-max"), trials = p.size("trials"), steps = p.size("steps");
  const double zp = p.real("zero-prob");
  const std::size_t trace_trial = p.size("trace-trial");
  require(n_max >= 2, "n-max must be >= 2");
  require(zp >= 0.0 && zp < 1.0, "zero-prob must lie in [0, 1)");

  io::CsvTable table({"trial", "n", "unique", "max_increase_kl", "max_increase_dinf"});
  io::CsvTable trace({"t", "kl", "dinf"});
  double worst_kl = -kInf, worst_dinf = -kInf;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(ctx.seed, t));
    const std::size_t n = 2 + rng.below(n_max - 1);
    const TransitionKernel k = random_kernel(n, rng, zp);
    const StationaryResult st = stationary(k);
    const FiniteDistribution p0 = random_distribution(n, rng, 0.3);
    const auto tk = divergence_trace(p0, k, st.pi, DivergenceKind::KL, steps);
    const auto td = divergence_trace(p0, k, st.pi, DivergenceKind::RenyiInf, steps);
    const double ik = verify_second_law(tk), id = verify_second_law(td);
    worst_kl = std::max(worst_kl, ik);
    worst_dinf = std::max(worst_dinf, id);
    table.add({fmt(t), fmt(n), fmt_bool(st.unique), fmt(ik), fmt(id)});
    if (t == trace_trial)
      for (std::size_t s = 0; s <= steps; ++s) trace.add({fmt(s), fmt(tk.values[s]), fmt(td.values[s])});
  }
  ctx.write("second_law.csv", table.str());
  if (trace.rows() > 0) ctx.write("trace.csv", trace.str());
  ctx.summary["trials"] = trials;
  ctx.summary["max_increase_kl"] = io::number(worst_kl);
  ctx.summary["max_increase_dinf"] = io::number(worst_dinf);
  ctx.summary["within_1e-12"] = worst_kl <= 1e-12 && worst_dinf <= 1e-12;
}

void cmd_gibbs_identity(CommandContext& ctx) {
  auto& p = ctx.params;
  const std::size_t n_max = p.size("n-max"), trials = p.size("trials");
  const double psi_max = p.real("psi-max");
  require(n_max >= 2, "n-max must be >= 2");
  require(psi_max >= 0.0 && std::isfinite(psi_max), "psi-max must be finite and >= 0");

  io::CsvTable table({"trial", "n", "kl_lhs", "kl_rhs", "dinf_lhs", "dinf_rhs"});
  double worst_kl = 0.0, worst_dinf = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(ctx.seed, t));
    const std::size_t n = 2 + rng.below(n_max - 1);
    const FiniteDistribution q = random_distribution(n, rng, 0.2);
    const PotentialVector psi = random_potential(n, rng, psi_max);
    const FiniteDistribution pg = gibbs_from_potential(q, psi).distribution();
    auto inside = [&](double zero_prob) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        if (q.in_support(i) && !rng.bernoulli(zero_prob)) w[i] = rng.exponential();
      if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[q.support().front()] = 1.0;
      return FiniteDistribution::normalized(std::move(w));
    };
    const FiniteDistribution mu = inside(0.2), nu = inside(0.2);
    const auto r = symmetric_identity(pg, q, psi, mu, nu);
    worst_kl = std::max(worst_kl, std::abs(r.kl_lhs - r.kl_rhs));
    worst_dinf = std::max(worst_dinf, std::abs(r.dinf_lhs - r.dinf_rhs));
    table.add({fmt(t), fmt(n), fmt(r.kl_lhs), fmt(r.kl_rhs), fmt(r.dinf_lhs), fmt(r.dinf_rhs)});
  }
  ctx.write("gibbs_identity.csv", table.str());
  ctx.summary["trials"] = trials;
  ctx.summary["max_abs_error_kl"] = worst_kl;
  ctx.summary["max_abs_error_dinf"] = worst_dinf;
  ctx.summary["within_1e-10"] = worst_kl <= 1e-10 && worst_dinf <= 1e-10;
}

void cmd_cld_box(CommandContext& ctx) {
  auto& p = ctx.params;
  const double a = p.real("a"), lo = p.real("lo"), hi = p.real("hi"), beta = p.real("beta");
  require(a >= 0.0, "a must be >= 0 so that L >= 0");
  require(std::isfinite(beta) && beta > 0.0, "beta must be positive and finite");
  const NoiseKind kind = noise_kind(p.text("diffusion"));
  NoiseScaleParams np{kind, p.real("alpha"), static_cast<int>(p.integer("k")), beta};
  validate(np);
  const std::size_t bins = positive(p, "bins"), n_grid = p.size("n-grid");
  const std::string dump = p.text("dump-samples");
  require(dump == "none" || dump == "bin" || dump == "csv", "dump-samples must be none, bin or csv");

  const LangevinSystem sys = quadratic_box_system(a, lo, hi, beta, diffusion_for(kind, np.alpha, np.k));
  const IntegratorConfig cfg = integrator_from(p, ctx.seed);
  const double lip = drift_lipschitz_estimate(sys, 64, ctx.seed);

  const auto sim = simulate_box(sys, np, a, cfg, bins);
  io::CsvTable hist({"bin", "lo", "hi", "empirical", "analytic"});
  for (std::size_t b = 0; b < bins; ++b) {
    const double w = (hi - lo) / static_cast<double>(bins);
    hist.add({fmt(b), fmt(lo + w * static_cast<double>(b)), fmt(lo + w * static_cast<double>(b + 1)), fmt(sim.hist[b]),
              fmt(sim.masses[b])});
  }
  ctx.write("histogram.csv", hist.str());

  const Loss1D loss{[a](double x) { return a * x * x; }, [a](double x) { return 2.0 * a * x; }};
  const auto quad = stationary_density_1d(
      loss, [np, a](double x) { return noise_sigma2(np, a * x * x); }, beta, lo, hi, n_grid);
  const auto exact = analytic_density_1d(np, [a](double x) { return a * x * x; }, lo, hi, n_grid);
  ctx.write("density.csv", io::density_csv(quad));

  if (dump == "bin") io::write_samples_binary(ctx.out_dir / "samples.bin", sim.samples, ctx.seed, 0);
  if (dump == "bin") ctx.artifacts.push_back(ctx.out_dir / "samples.bin");
  if (dump == "csv") ctx.write("samples.csv", io::samples_csv(sim.samples));

  ctx.summary["kept_draws"] = sim.kept;
  ctx.summary["tv"] = sim.tv;
  ctx.summary["kl_discrete"] = sim.kl;
  ctx.summary["dt_times_lipschitz"] = cfg.dt * lip;
  ctx.summary["quadrature_vs_analytic_tv"] = grid_tv(quad, exact);
  ctx.summary["quadrature_vs_analytic_max_rel"] = grid_max_rel(quad, exact);
}

void cmd_cld_reg(CommandContext& ctx) {
  auto& p = ctx.params;
  const double a = p.real("a"), c = p.real("c"), beta = p.real("beta"), lambda = p.real("lambda");
  const double init_std = p.real("init-std");
  require(a >= 0.0 && std::isfinite(beta) && beta > 0.0 && lambda >= 0.0, "need a >= 0, beta > 0, lambda >= 0");
  require(2.0 * beta * a + lambda > 0.0, "the stationary law is improper when a = lambda = 0");
  const std::size_t bins = positive(p, "bins");

  LangevinSystem sys;
  sys.dim = 1;
  sys.loss = [a, c](const double* x) { return a * (x[0] - c) * (x[0] - c); };
  sys.grad = [a, c](const double* x, double* g) { g[0] = 2.0 * a * (x[0] - c); };
  sys.beta = beta;
  sys.lambda = {lambda};
  const IntegratorConfig cfg = integrator_from(p, ctx.seed);
  const SampleSet s = simulate_ensemble(sys, gaussian_init({0.0}, {init_std}), cfg);
  require(s.rows > 1, "need at least two kept draws");

  // Stationary law: exp(-beta a (x - c)^2 - lambda x^2 / 2), a Gaussian.
  const double prec = 2.0 * beta * a + lambda;
  const double mean = 2.0 * beta * a * c / prec, var = 1.0 / prec;
  double m = 0.0, m2 = 0.0;
  for (double v : s.data) m += v;
  m /= static_cast<double>(s.rows);
  for (double v : s.data) m2 += (v - m) * (v - m);
  m2 /= static_cast<double>(s.rows - 1);

  const BoxDomain window = BoxDomain::cube(1, mean - 6.0 * std::sqrt(var), mean + 6.0 * std::sqrt(var));
  SampleSet inside{1, 0, {}};
  for (double v : s.data)
    if (window.contains(&v)) inside.data.push_back(v);
  inside.rows = inside.data.size();
  const auto hist = histogram(inside, window, bins);
  const auto cmp = compare_density(
      hist, [mean, var](const double* x) { return std::exp(-0.5 * (x[0] - mean) * (x[0] - mean) / var); }, window,
      bins, inside.rows);

  io::CsvTable t({"quantity", "empirical", "exact"});
  t.add({"mean", fmt(m), fmt(mean)});
  t.add({"variance", fmt(m2), fmt(var)});
  ctx.write("moments.csv", t.str());
  ctx.summary["kept_draws"] = s.rows;
  ctx.summary["outside_window"] = s.rows - inside.rows;
  ctx.summary["mean"] = m;
  ctx.summary["mean_exact"] = mean;
  ctx.summary["variance"] = m2;
  ctx.summary["variance_exact"] = var;
  ctx.summary["tv"] = cmp.tv;
  ctx.summary["dt_times_lipschitz"] = cfg.dt * drift_lipschitz_estimate(sys, 64, ctx.seed);
}

void cmd_noise_scales(CommandContext& ctx) {
  auto& p = ctx.params;
  const double a = p.real("a"), lo = p.real("lo"), hi = p.real("hi"), beta = p.real("beta");
  require(a >= 0.0, "a must be >= 0");
  const std::size_t n_grid = p.size("n-grid"), bins = positive(p, "bins");
  const int k = static_cast<int>(p.integer("k"));
  const bool simulate = p.flag("simulate");

  std::vector<std::string> kinds;
  std::vector<double> alphas;
  {
    std::string cur;
    for (char ch : p.text("kinds") + ",") {
      if (ch == ',') {
        if (!cur.empty()) kinds.push_back(cur);
        cur.clear();
      } else if (ch != ' ') {
        cur += ch;
      }
    }
    for (const auto& v : parse_beta_list(p.text("alpha"), 1.0)) alphas.push_back(v);
  }
  require(!kinds.empty(), "no noise kinds given");
  require(alphas.size() == kinds.size(), "need one alpha per noise kind");

  IntegratorConfig cfg;
  if (simulate) cfg = integrator_from(p, ctx.seed);
  io::CsvTable table({"kind", "alpha", "k", "quadrature_vs_analytic_tv", "quadrature_vs_analytic_max_rel", "sim_tv"});
  Json per_kind = Json::array();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const NoiseKind kind = noise_kind(kinds[i]);
    const NoiseScaleParams np{kind, alphas[i], k, beta};
    validate(np);
    const Loss1D loss{[a](double x) { return a * x * x; }, [a](double x) { return 2.0 * a * x; }};
    const auto quad = stationary_density_1d(
        loss, [np, a](double x) { return noise_sigma2(np, a * x * x); }, beta, lo, hi, n_grid);
    const auto exact = analytic_density_1d(np, [a](double x) { return a * x * x; }, lo, hi, n_grid);
    ctx.write(std::string("density_") + kind_name(kind) + ".csv", io::density_csv(quad));
    const double tv = grid_tv(quad, exact), rel = grid_max_rel(quad, exact);
    std::string sim_tv;
    Json rec;
    rec["kind"] = kind_name(kind);
    rec["quadrature_vs_analytic_tv"] = tv;
    if (simulate) {
      IntegratorConfig c = cfg;
      c.seed = derive_seed(ctx.seed, i);
      const auto sim = simulate_box(quadratic_box_system(a, lo, hi, beta, diffusion_for(kind, np.alpha, k)), np, a, c,
                                    bins);
      sim_tv = fmt(sim.tv);
      rec["sim_tv"] = sim.tv;
    }
    table.add({kind_name(kind), fmt(np.alpha), std::to_string(k), fmt(tv), fmt(rel), sim_tv});
    per_kind.push_back(std::move(rec));
  }
  ctx.write("noise_scales.csv", table.str());
  ctx.summary["kinds"] = std::move(per_kind);
}

void cmd_linreg(CommandContext& ctx) {
  auto& p = ctx.params;
  std::vector<std::map<std::string, std::string>> grid{{}};
  const std::string sweep = p.text("sweep");
  if (!sweep.empty()) grid = parse_sweep_manifest(io::read_file(sweep));
  for (const auto& g : grid)
    for (const auto& [key, v] : g) {
      (void)v;
      require(key == "n" || key == "d" || key == "sigma" || key == "lambda" || key == "beta" || key == "seed",
              "sweep manifest key '" + key + "' is not one of n, d, sigma, lambda, beta, seed");
    }

  const std::size_t mc = p.size("mc-samples"), n_init = p.size("init-samples");
  const double delta = p.real("delta");
  const bool sde = p.flag("sde");
  std::vector<std::string> head{"N", "d", "sigma", "lambda", "beta", "seed", "closed_train", "closed_pop",
                                "mc_train", "mc_pop", "mc_se_train", "mc_se_pop", "asym_train", "asym_pop",
                                "init_loss", "bound"};
  if (sde) {
    head.push_back("sde_train");
    head.push_back("sde_pop");
  }
  io::CsvTable table(head);
  Json rows = Json::array();
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    auto pick = [&](const std::string& key) {
      auto it = grid[gi].find(key);
      if (it != grid[gi].end()) return it->second;
      if (key == "seed") return std::to_string(ctx.seed);
      const Json& v = p.raw(key);
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    const io::Json typed = resolve_params("linreg", {{"n", pick("n")}, {"d", pick("d")}, {"sigma", pick("sigma")}});
    const auto n = static_cast<std::size_t>(typed["n"].get<long long>());
    const auto d = static_cast<std::size_t>(typed["d"].get<long long>());
    const double sigma = typed["sigma"].get<double>();
    const std::string lam_s = pick("lambda");
    const double lambda = lam_s == "d" ? static_cast<double>(d) : parse_beta(lam_s, static_cast<double>(n));
    const double beta = parse_beta(pick("beta"), static_cast<double>(n));
    const std::uint64_t seed = std::stoull(pick("seed"));

    const RegressionProblem prob = generate_problem(n, d, sigma, lambda, beta, seed);
    const LossPair cf = closed_form_losses(prob);
    const McLosses mcl = mc_losses(prob, mc, derive_seed(seed, 1));
    const LossPair as = asymptotic_losses(d, beta, sigma, n);
    const InitLossEstimate e0 = linreg_init_loss(prob, n_init, derive_seed(seed, 2));
    const double bound = cld_bound(BoundMode::Mean, beta, e0.mean, static_cast<double>(n), delta);
    std::vector<std::string> row{fmt(n),        fmt(d),        fmt(sigma),        fmt(lambda),
                                 fmt(beta),     std::to_string(seed), fmt(cf.train), fmt(cf.pop),
                                 fmt(mcl.train), fmt(mcl.pop), fmt(mcl.se_train), fmt(mcl.se_pop),
                                 fmt(as.train), fmt(as.pop),   fmt(e0.mean),      fmt(bound)};
    if (sde) {
      SdeOracleConfig sc;
      sc.dt = p.real("sde-dt");
      sc.seed = derive_seed(seed, 3);
      const auto so = sde_oracle_losses(prob, sc);
      row.push_back(fmt(so.train));
      row.push_back(fmt(so.pop));
    }
    table.add(std::move(row));
    rows.push_back(Json{{"N", n}, {"d", d}, {"closed_train", cf.train}, {"closed_pop", cf.pop}, {"mc_train", mcl.train},
                        {"mc_pop", mcl.pop}, {"bound", io::number(bound)}});
  }
  ctx.write("linreg.csv", table.str());
  ctx.summary["grid_points"] = grid.size();
  ctx.summary["rows"] = std::move(rows);
}

void cmd_parity_train(CommandContext& ctx) {
  auto& p = ctx.params;
  const std::size_t d = p.size("d"), k = p.size("k"), n = p.size("n"), n_test = p.size("n-test");
  const auto dims = parse_size_list(p.text("dims"));
  const auto betas = parse_beta_list(p.text("beta-sweep"), static_cast<double>(n));
  const std::size_t seeds = positive(p, "seeds");
  const std::string out_name = p.text("out");
  require(!out_name.empty(), "--out must name a file");
  require(dims.front() == d, "first layer width must equal d");

  const auto [train, test] = parity_dataset(d, k, n, n_test, ctx.seed);
  TrainConfig base;
  base.lr = p.real("lr");
  base.batch_size = p.size("batch-size");
  base.epochs = p.size("epochs");
  base.lambda = p.real("lambda");
  base.delta = p.real("delta");
  base.n_init_samples = p.size("n-init");

  io::CsvTable runs({"beta", "seed_index", "train_err", "test_err", "gap", "E_init_loss", "bound", "non_vacuous"});
  io::CsvTable report({"beta", "train_err", "test_err", "gap", "E_init_loss", "bound", "non_vacuous"});
  Json summary_rows = Json::array();
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    double tr = 0, te = 0, gap = 0, e0 = 0, bd = 0;
    for (std::size_t s = 0; s < seeds; ++s) {
      TrainConfig cfg = base;
      cfg.beta = betas[bi];
      cfg.seed = derive_seed(ctx.seed, 1000 + s);
      const CertReport r = train_and_certify(dims, train, test, cfg);
      runs.add({fmt(r.beta), fmt(s), fmt(r.train_error), fmt(r.test_error), fmt(r.gap), fmt(r.init_loss),
                fmt(r.bound), fmt_bool(r.non_vacuous)});
      tr += r.train_error;
      te += r.test_error;
      gap += r.gap;
      e0 += r.init_loss;
      bd += r.bound;
    }
    const double ns = static_cast<double>(seeds);
    tr /= ns;
    te /= ns;
    gap /= ns;
    e0 /= ns;
    bd /= ns;
    const bool nv = tr + bd < 0.5;
    report.add({fmt(betas[bi]), fmt(tr), fmt(te), fmt(gap), fmt(e0), fmt(bd), fmt_bool(nv)});
    summary_rows.push_back(Json{{"beta", io::number(betas[bi])}, {"train_err", tr}, {"test_err", te}, {"gap", gap},
                                {"bound", io::number(bd)}, {"non_vacuous", nv}});
  }
  ctx.write(out_name, report.str());
  ctx.write("runs.csv", runs.str());
  ctx.summary["parity_coords"] = train.parity_coords;
  ctx.summary["rows"] = std::move(summary_rows);
}

void cmd_bounds(CommandContext& ctx) {
  auto& p = ctx.params;
  const std::size_t n_int = p.size("n");
  const double n = static_cast<double>(n_int);
  const double beta_v = parse_beta(p.text("beta"), n);
  const double init_loss = p.real("init-loss"), delta = p.real("delta"), vol = p.real("vol-ratio");
  const std::string mode_s = p.text("mode");
  require(mode_s == "mean" || mode_s == "single", "mode must be mean or single");
  const BoundMode mode = mode_s == "mean" ? BoundMode::Mean : BoundMode::Single;
  require(vol >= 1.0, "vol-ratio must be >= 1");

  const double cld = restricted_box_bound(mode, beta_v, init_loss, vol, 1.0, n, delta);
  const double thr = cld_beta_threshold(0.5, init_loss, n, delta);
  BoundInputs in{n, delta, p.real("kl-init"), p.real("dinf-init"), p.real("mean-potential"), p.real("sup-potential")};
  const double emp = p.real("empirical-error");
  const BoundReport rep = certificate(in, emp >= 0.0 ? std::optional<double>(emp) : std::nullopt);

  io::CsvTable t({"mode", "beta", "init_loss", "N", "delta", "vol_ratio", "bound", "beta_threshold_half",
                  "bound_mean", "bound_single", "kl_budget", "inverted_bound", "fast_gap_bound"});
  std::string budget, inverted, fast;
  if (emp >= 0.0) {
    const double div = mode == BoundMode::Mean ? in.kl_init + in.mean_potential : in.dinf_init + in.sup_potential;
    const auto kf = kl_form_bounds(mode, div, emp, n, delta);
    budget = fmt(kf.kl_budget_per_sample);
    inverted = fmt(kf.inverted_bound);
    fast = fmt(kf.fast_gap_bound);
    ctx.summary["kl_form"] = Json{{"kl_budget", kf.kl_budget_per_sample},
                                  {"inverted_bound", kf.inverted_bound},
                                  {"fast_gap_bound", kf.fast_gap_bound}};
  }
  t.add({mode_s, fmt(beta_v), fmt(init_loss), fmt(n_int), fmt(delta), fmt(vol), fmt(cld), fmt(thr),
         fmt(rep.bound_mean), fmt(rep.bound_single), budget, inverted, fast});
  ctx.write("bounds.csv", t.str());
  ctx.summary["bound"] = io::number(cld);
  ctx.summary["beta_threshold_half"] = io::number(thr);
  ctx.summary["certificate"] = io::to_json(rep);
}

void cmd_counterexample(CommandContext& ctx) {
  const std::size_t n = positive(ctx.params, "n");
  const auto r = counterexample_run(n, ctx.seed);
  io::CsvTable t({"t", "p_zero", "p_one", "p_mem", "expected_gap"});
  for (std::size_t s = 0; s < 3; ++s)
    t.add({fmt(s), fmt(r.marginals[s][kZero]), fmt(r.marginals[s][kOne]), fmt(r.marginals[s][kMem]),
           fmt(r.gap_trace[s])});
  ctx.write("gap_trace.csv", t.str());
  Json j;
  j["n"] = n;
  j["label_ones"] = r.ones;
  j["empirical_error"] = Json{{"zero", r.empirical_error[kZero]}, {"one", r.empirical_error[kOne]},
                              {"mem", r.empirical_error[kMem]}};
  j["population_error"] = Json{{"zero", 0.5}, {"one", 0.5}, {"mem", 0.5}};
  j["gap_trace"] = Json{r.gap_trace[0], r.gap_trace[1], r.gap_trace[2]};
  j["memorizer_gap"] = r.memorizer_gap;
  j["kl_init"] = r.kl_init;
  j["kl_stationary_from_init"] = r.kl_stationary_from_init;
  j["reverse_divergence"] = io::number(r.reverse_divergence);
  j["reverse_divergence_finite"] = r.reverse_divergence_finite;
  ctx.write("counterexample.json", j.dump(2) + "\n");
  ctx.summary = j;
}

void cmd_shatter(CommandContext& ctx) {
  auto& p = ctx.params;
  ShatterSpec spec;
  spec.m = positive(p, "m");
  spec.l_amp = positive(p, "l-amp");
  const std::string lab = p.text("labels");
  Rng rng(ctx.seed);
  for (std::size_t i = 0; i < spec.m; ++i) {
    if (lab == "random") spec.labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
    else if (lab == "alternating") spec.labels.push_back(static_cast<int>(i % 2));
    else if (lab == "zeros") spec.labels.push_back(0);
    else if (lab == "ones") spec.labels.push_back(1);
  }
  if (spec.labels.empty()) {
    require(lab.size() == spec.m && lab.find_first_not_of("01") == std::string::npos,
            "labels must be random, alternating, zeros, ones or a 0/1 string of length m");
    for (char c : lab) spec.labels.push_back(c - '0');
  }
  const std::size_t ex = p.size("exhaustive");
  require(ex <= std::min<std::size_t>(spec.m, 20), "exhaustive must be <= min(m, 20)");

  const MlpParams net = build_shattering_net(spec);
  const auto check = verify_shattering(net, spec);
  const auto audit = audit_weight_bounds(net);
  const double analytic = shattering_analytic_output(spec.m, spec.l_amp);

  std::size_t ex_ok = 0;
  for (std::size_t mask = 0; ex > 0 && mask < (std::size_t{1} << ex); ++mask) {
    ShatterSpec s2 = spec;
    for (std::size_t i = 0; i < ex; ++i) s2.labels[i] = static_cast<int>((mask >> i) & 1u);
    const auto n2 = build_shattering_net(s2);
    if (verify_shattering(n2, s2).margin_ok && audit_weight_bounds(n2).ok) ++ex_ok;
  }

  io::CsvTable t({"i", "x", "label", "output"});
  for (std::size_t i = 0; i < spec.m; ++i)
    t.add({fmt(i + 1), fmt(static_cast<double>(i + 1) / static_cast<double>(spec.m)), std::to_string(spec.labels[i]),
           fmt(check.outputs[i])});
  ctx.write("outputs.csv", t.str());
  ctx.write("net.json", io::to_json(net).dump() + "\n");
  ctx.summary["m"] = spec.m;
  ctx.summary["l_amp"] = spec.l_amp;
  ctx.summary["analytic_output"] = analytic;
  ctx.summary["min_positive_output"] = io::number(check.min_positive);
  ctx.summary["max_negative_output"] = io::number(check.max_negative);
  ctx.summary["margin_ok"] = check.margin_ok;
  ctx.summary["weight_audit_ok"] = audit.ok;
  ctx.summary["exhaustive_labelings"] = ex > 0 ? (std::size_t{1} << ex) : 0;
  ctx.summary["exhaustive_ok"] = ex_ok;
}

}  // namespace

const std::map<std::string, CommandFn>& command_table() {
  static const std::map<std::string, CommandFn> t{
      {"second-law", cmd_second_law}, {"gibbs-identity", cmd_gibbs_identity}, {"cld-box", cmd_cld_box},
      {"cld-reg", cmd_cld_reg},       {"noise-scales", cmd_noise_scales},     {"linreg", cmd_linreg},
      {"parity-train", cmd_parity_train}, {"bounds", cmd_bounds},            {"counterexample", cmd_counterexample},
      {"shatter", cmd_shatter},
  };
  return t;
}

}  // namespace gencert::cli::detail
