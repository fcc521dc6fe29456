#include "gencert/linreg.hpp"

#include <algorithm>
#include <cmath>

#include "gencert/error.hpp"
#include "gencert/langevin.hpp"
#include "gencert/rng.hpp"

namespace gencert {

Eigen::MatrixXd RegressionProblem::a() const { return (x.transpose() * x) / static_cast<double>(n()); }

double RegressionProblem::alpha() const { return std::isfinite(beta) ? lambda / beta : 0.0; }

Eigen::VectorXd RegressionProblem::theta_ls() const {
  Eigen::LLT<Eigen::MatrixXd> llt(a());
  if (llt.info() != Eigen::Success) throw NumericalError("empirical covariance A is singular");
  return llt.solve(x.transpose() * y / static_cast<double>(n()));
}

double RegressionProblem::train_loss(const Eigen::VectorXd& theta) const {
  return (x * theta - y).squaredNorm() / (2.0 * static_cast<double>(n()));
}

double RegressionProblem::pop_loss(const Eigen::VectorXd& theta) const {
  return 0.5 * (theta - theta_star).squaredNorm() + 0.5 * sigma * sigma;
}

void validate(const RegressionProblem& p) {
  require(p.d() > 0 && p.n() > p.d(), "need N > d");
  require(static_cast<std::size_t>(p.y.size()) == p.n(), "y must have N entries");
  require(static_cast<std::size_t>(p.theta_star.size()) == p.d(), "theta* must have d entries");
  require(std::abs(p.theta_star.norm() - 1.0) <= 1e-12, "theta* must have unit norm");
  require(std::isfinite(p.sigma) && p.sigma >= 0.0, "sigma must be >= 0");
  require(std::isfinite(p.lambda) && p.lambda >= 0.0, "lambda must be >= 0");
  require(p.beta > 0.0 && !std::isnan(p.beta), "beta must be positive (or +inf)");
}

RegressionProblem generate_problem(std::size_t n, std::size_t d, double sigma, double lambda, double beta,
                                   std::uint64_t seed) {
  require(d > 0 && n > d + 3, "need N > d + 3");
  Rng rng(seed);
  RegressionProblem p;
  p.sigma = sigma;
  p.lambda = lambda;
  p.beta = beta;
  p.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < p.x.rows(); ++i)
    for (Eigen::Index j = 0; j < p.x.cols(); ++j) p.x(i, j) = rng.normal();
  p.theta_star.resize(static_cast<Eigen::Index>(d));
  for (auto& v : p.theta_star) v = rng.normal();
  p.theta_star /= p.theta_star.norm();
  p.y = p.x * p.theta_star;
  for (auto& v : p.y) v += sigma * rng.normal();
  validate(p);
  return p;
}

namespace {

Eigen::MatrixXd shifted(const RegressionProblem& p) {
  Eigen::MatrixXd m = p.a();
  m.diagonal().array() += p.alpha();
  return m;
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("A + alpha I is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

double inv_beta(const RegressionProblem& p) { return std::isfinite(p.beta) ? 1.0 / p.beta : 0.0; }

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("covariance factorization failed");
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-12 * std::max(1.0, ev.maxCoeff())) throw NumericalError("covariance is not PSD");
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

struct Welford {
  double n = 0, mean = 0, m2 = 0;
  void add(double v) {
    n += 1;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double se() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0; }
};

}  // namespace

StationaryGaussian posterior_gaussian(const RegressionProblem& p) {
  validate(p);
  const Eigen::MatrixXd minv = spd_inverse(shifted(p));
  StationaryGaussian g;
  g.mean = minv * (p.x.transpose() * p.y) / static_cast<double>(p.n());
  g.cov = minv * inv_beta(p);
  g.cov = 0.5 * (g.cov + g.cov.transpose());
  return g;
}

LossPair closed_form_losses(const RegressionProblem& p) {
  validate(p);
  const double n = static_cast<double>(p.n()), d = static_cast<double>(p.d());
  const double al = p.alpha(), ib = inv_beta(p), s2 = p.sigma * p.sigma;
  const Eigen::MatrixXd a = p.a();
  const Eigen::MatrixXd minv = spd_inverse(shifted(p));
  const Eigen::MatrixXd minv2 = minv * minv;
  const Eigen::VectorXd& ts = p.theta_star;
  LossPair r{};
  r.train = 0.5 * ib * (a * minv).trace() + 0.5 * al * al * ts.dot(minv2 * a * ts) +
            s2 * al * al / (2.0 * n) * minv2.trace() + 0.5 * s2 * (1.0 - d / n);
  r.pop = 0.5 * ib * minv.trace() + 0.5 * ts.dot(a * a * minv2 * ts) + s2 / (2.0 * n) * (a * minv2).trace() -
          ts.dot(a * minv * ts) + 0.5 * ts.squaredNorm() + 0.5 * s2;
  return r;
}

LossPair conditional_losses(const RegressionProblem& p) {
  const StationaryGaussian g = posterior_gaussian(p);
  LossPair r{};
  r.train = p.train_loss(g.mean) + 0.5 * (p.a() * g.cov).trace();
  r.pop = p.pop_loss(g.mean) + 0.5 * g.cov.trace();
  return r;
}

McLosses mc_losses(const RegressionProblem& p, std::size_t n_samples, std::uint64_t seed, LabelNoise noise) {
  require(n_samples >= 2, "need at least two samples");
  const StationaryGaussian g = posterior_gaussian(p);
  const Eigen::MatrixXd root = symmetric_sqrt(g.cov);
  const Eigen::MatrixXd minv_xt =
      spd_inverse(shifted(p)) * p.x.transpose() / static_cast<double>(p.n());  // theta_bar = minv_xt y
  const Eigen::VectorXd clean = p.x * p.theta_star;
  const auto n = static_cast<Eigen::Index>(p.n()), d = static_cast<Eigen::Index>(p.d());

  Rng rng(seed);
  Welford tr, po;
  Eigen::VectorXd y = p.y, z(d), theta(d);
  Eigen::VectorXd mean = g.mean;
  for (std::size_t s = 0; s < n_samples; ++s) {
    if (noise == LabelNoise::Resample) {
      for (Eigen::Index i = 0; i < n; ++i) y(i) = clean(i) + p.sigma * rng.normal();
      mean.noalias() = minv_xt * y;
    }
    for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
    theta.noalias() = root * z;
    theta += mean;
    tr.add((p.x * theta - y).squaredNorm() / (2.0 * static_cast<double>(n)));
    po.add(p.pop_loss(theta));
  }
  return {tr.mean, po.mean, tr.se(), po.se()};
}

LossPair asymptotic_losses(std::size_t d, double beta, double sigma, std::size_t n) {
  require(d > 0 && n > d + 3, "need N > d + 3");
  require(beta > 0.0 && !std::isnan(beta), "beta must be positive (or +inf)");
  const double dd = static_cast<double>(d), nn = static_cast<double>(n), s2 = sigma * sigma;
  const double ib = std::isfinite(beta) ? 1.0 / beta : 0.0;
  LossPair r{};
  r.train = 0.5 * dd * (ib + s2 * (1.0 / dd - 1.0 / nn));
  r.pop = 0.5 * (ib + s2 * (nn - 1.0) / (nn * dd)) * nn * dd / (nn - dd - 1.0);
  return r;
}

SdeOracleResult sde_oracle_losses(const RegressionProblem& p, const SdeOracleConfig& cfg) {
  validate(p);
  require(cfg.dt > 0.0 && cfg.t_thin >= cfg.dt && cfg.t_sample >= cfg.t_thin && cfg.t_burn >= 0.0,
          "need dt <= t_thin <= t_sample and t_burn >= 0");
  require(cfg.label_draws >= 2 && cfg.traj_per_draw >= 1, "need >= 2 label draws and >= 1 trajectory each");
  require(std::isfinite(p.beta), "the SDE oracle needs finite beta");

  const Eigen::MatrixXd a = p.a();
  Eigen::MatrixXd step_op = Eigen::MatrixXd::Identity(a.rows(), a.cols()) - cfg.dt * shifted(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(step_op);
  const double spectral = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(spectral < 1.0))
    throw NumericalError("dt too large: ||I - dt(A + alpha I)||_2 = " + std::to_string(spectral) + " >= 1");

  const std::size_t d = p.d();
  const double n = static_cast<double>(p.n());
  IntegratorConfig ic;
  ic.dt = cfg.dt;
  ic.burn_in = static_cast<std::size_t>(std::llround(cfg.t_burn / cfg.dt));
  ic.thin = static_cast<std::size_t>(std::llround(cfg.t_thin / cfg.dt));
  ic.steps = ic.burn_in + static_cast<std::size_t>(std::llround(cfg.t_sample / cfg.dt));
  ic.n_traj = cfg.traj_per_draw;
  ic.workers = cfg.workers;

  const Eigen::VectorXd clean = p.x * p.theta_star;
  Welford tr, po;
  for (std::size_t r = 0; r < cfg.label_draws; ++r) {
    Rng rng(derive_seed(cfg.seed, 2 * r));
    Eigen::VectorXd y = clean;
    for (auto& v : y) v += p.sigma * rng.normal();
    const Eigen::VectorXd b = p.x.transpose() * y / n;
    const double yy = y.squaredNorm() / (2.0 * n);

    LangevinSystem sys;
    sys.dim = d;
    sys.beta = p.beta;
    sys.lambda.assign(d, p.lambda);
    sys.grad = [&a, &b, d](const double* th, double* g) {
      Eigen::Map<const Eigen::VectorXd> t(th, static_cast<Eigen::Index>(d));
      Eigen::Map<Eigen::VectorXd>(g, static_cast<Eigen::Index>(d)) = a * t - b;
    };
    ic.seed = derive_seed(cfg.seed, 2 * r + 1);
    const SampleSet s = simulate_ensemble(sys, point_init(std::vector<double>(d, 0.0)), ic);

    double st = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < s.rows; ++i) {
      Eigen::Map<const Eigen::VectorXd> t(s.row(i), static_cast<Eigen::Index>(d));
      st += 0.5 * t.dot(a * t) - t.dot(b) + yy;
      sp += p.pop_loss(t);
    }
    tr.add(st / static_cast<double>(s.rows));
    po.add(sp / static_cast<double>(s.rows));
  }
  return {tr.mean, po.mean, tr.se(), po.se(), spectral};
}

InitLossEstimate linreg_init_loss(const RegressionProblem& p, std::size_t n_draws, std::uint64_t seed) {
  validate(p);
  require(p.lambda > 0.0, "p0 = N(0, I/lambda) needs lambda > 0");
  require(n_draws >= 2, "need at least two draws");
  Rng rng(seed);
  const double sd = 1.0 / std::sqrt(p.lambda);
  Welford w;
  double mx = 0.0;
  Eigen::VectorXd t(static_cast<Eigen::Index>(p.d()));
  for (std::size_t i = 0; i < n_draws; ++i) {
    for (auto& v : t) v = sd * rng.normal();
    const double l = p.train_loss(t);
    w.add(l);
    mx = std::max(mx, l);
  }
  const double exact = p.a().trace() / (2.0 * p.lambda) + p.y.squaredNorm() / (2.0 * static_cast<double>(p.n()));
  return {w.mean, w.se(), mx, exact};
}

}  // namespace gencert
