#include "gencert/markov.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "gencert/error.hpp"
#include "gencert/simd/kernels.hpp"

namespace gencert {

TransitionKernel::TransitionKernel(std::size_t n, std::vector<double> row_major) : n_(n), k_(std::move(row_major)) {
  require(n > 0, "kernel needs at least one state");
  require(k_.size() == n * n, "kernel data must have n*n entries");
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = k_[i * n + j];
      require(std::isfinite(v) && v >= 0.0, "kernel entries must be finite and nonnegative");
      s += v;
    }
    require(std::abs(s - 1.0) <= kDistributionTol, "kernel row " + std::to_string(i) + " does not sum to 1");
  }
}

TransitionKernel TransitionKernel::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& r : rows) {
    require(r.size() == n, "kernel must be square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return TransitionKernel(n, std::move(flat));
}

TransitionKernel TransitionKernel::identity(std::size_t n) {
  std::vector<double> k(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) k[i * n + i] = 1.0;
  return TransitionKernel(n, std::move(k));
}

FiniteDistribution TransitionKernel::apply(const FiniteDistribution& p) const {
  require(p.size() == n_, "distribution and kernel dimensions differ");
  std::vector<double> out(n_, 0.0);
  simd::active_kernels().matvec_t_acc(k_.data(), n_, n_, p.data(), out.data());
  return FiniteDistribution::normalized(std::move(out));
}

TransitionKernel TransitionKernel::then(const TransitionKernel& other) const {
  require(other.n_ == n_, "kernel dimensions differ");
  const auto& kt = simd::active_kernels();
  std::vector<double> out(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    kt.matvec_t_acc(other.k_.data(), n_, n_, k_.data() + i * n_, out.data() + i * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += out[i * n_ + j];
    for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] /= s;
  }
  return TransitionKernel(n_, std::move(out));
}

std::vector<FiniteDistribution> evolve(const FiniteDistribution& p0, const TransitionKernel& k, std::size_t steps) {
  require(p0.size() == k.size(), "distribution and kernel dimensions differ");
  std::vector<FiniteDistribution> out;
  out.reserve(steps + 1);
  out.push_back(p0);
  for (std::size_t t = 0; t < steps; ++t) out.push_back(k.apply(out.back()));
  return out;
}

double stationarity_residual(const FiniteDistribution& pi, const TransitionKernel& k) {
  return max_abs_diff(k.apply(pi), pi);
}

StationaryResult stationary(const TransitionKernel& k) {
  const auto n = static_cast<Eigen::Index>(k.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = k(j, i) - (i == j ? 1.0 : 0.0);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double thresh = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;

  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = m;
  a.row(n).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b(n) = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(1e-12);
  Eigen::VectorXd x = cod.solve(b);
  if (!x.allFinite()) throw NumericalError("stationary solve produced non-finite values");

  std::vector<double> w(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = std::max(0.0, x(i));
  StationaryResult r{FiniteDistribution::normalized(std::move(w)), rank == n - 1};
  const double res = stationarity_residual(r.pi, k);
  if (res >= 1e-10)
    throw NumericalError("stationary solve residual " + std::to_string(res) + " exceeds 1e-10");
  return r;
}

DivergenceTrace divergence_trace(const FiniteDistribution& p0, const TransitionKernel& k,
                                 const FiniteDistribution& pi, DivergenceKind kind, std::size_t steps) {
  require(pi.size() == k.size(), "reference and kernel dimensions differ");
  require(stationarity_residual(pi, k) < 1e-10, "reference distribution is not stationary for the kernel");
  DivergenceTrace trace{kind, {}, pi};
  trace.values.reserve(steps + 1);
  for (const auto& p : evolve(p0, k, steps)) trace.values.push_back(divergence(kind, p, pi));
  return trace;
}

double verify_second_law(const DivergenceTrace& trace) {
  double worst = -kInf;
  for (std::size_t t = 0; t + 1 < trace.values.size(); ++t)
    worst = std::max(worst, extended_increment(trace.values[t + 1], trace.values[t]));
  return worst;
}

std::vector<CorollarySlack> corollary_bound_check(const FiniteDistribution& p0, const FiniteDistribution& nu,
                                                  const GibbsSpec& gibbs, const TransitionKernel& k,
                                                  std::size_t steps) {
  require(gibbs.base.size() == nu.size() && max_abs_diff(gibbs.base, nu) <= kDistributionTol,
          "Gibbs base must equal nu");
  for (auto i : nu.support()) require(gibbs.potential[i] >= 0.0, "potential must be nonnegative on supp(nu)");
  const FiniteDistribution p_inf = gibbs.distribution();
  require(stationarity_residual(p_inf, k) < 1e-10, "Gibbs law is not stationary for the kernel");

  const double kl0 = kl(p0, nu);
  const double dinf0 = dinf(p0, nu);
  const double mean0 = expectation(p0, gibbs.potential);
  const double sup0 = max_over_support(p0, gibbs.potential);

  std::vector<CorollarySlack> out;
  out.reserve(steps + 1);
  std::size_t t = 0;
  for (const auto& p : evolve(p0, k, steps)) {
    CorollarySlack s{t++, kInf, kInf};
    const double mean_t = expectation(p, gibbs.potential);
    if (std::isfinite(kl0) && std::isfinite(mean0)) {
      // E_{p_t} Psi may be +inf only if p_t leaves supp(p_inf); then the
      // bound side is -inf and the slack is reported as such.
      s.slack_kl = (kl0 + mean0 - mean_t) - kl(p, nu);
    }
    if (std::isfinite(dinf0) && std::isfinite(sup0)) s.slack_dinf = (dinf0 + sup0) - dinf(p, nu);
    out.push_back(s);
  }
  return out;
}

DpiResult verify_dpi(const std::vector<double>& joint_p, const std::vector<double>& joint_q, std::size_t n,
                     std::size_t m) {
  require(joint_p.size() == n * m && joint_q.size() == n * m, "joint sizes must be n*m");
  const FiniteDistribution jp(joint_p), jq(joint_q);
  std::vector<double> mp(n, 0.0), mq(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      mp[i] += joint_p[i * m + j];
      mq[i] += joint_q[i * m + j];
    }
  return {kl(jp, jq), kl(FiniteDistribution::normalized(mp), FiniteDistribution::normalized(mq))};
}

std::vector<double> ring_proposal(std::size_t n) {
  require(n >= 2, "ring proposal needs n >= 2");
  std::vector<double> q(n * n, 0.0);
  if (n == 2) {
    q[1] = q[2] = 1.0;
    return q;
  }
  for (std::size_t i = 0; i < n; ++i) {
    q[i * n + (i + 1) % n] += 0.5;
    q[i * n + (i + n - 1) % n] += 0.5;
  }
  return q;
}

TransitionKernel metropolis_kernel(const FiniteDistribution& target, const std::vector<double>& proposal) {
  const std::size_t n = target.size();
  require(proposal.size() == n * n, "proposal must be n*n");
  std::vector<double> k(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double q = proposal[i * n + j];
      require(q >= 0.0 && std::abs(q - proposal[j * n + i]) <= 1e-15, "proposal must be symmetric and nonnegative");
      if (q == 0.0) continue;
      double accept = 1.0;
      if (target[i] > 0.0) accept = std::min(1.0, target[j] / target[i]);
      k[i * n + j] = q * accept;
      off += k[i * n + j];
    }
    require(off <= 1.0 + 1e-12, "proposal row mass exceeds 1");
    k[i * n + i] = std::max(0.0, 1.0 - off);
  }
  return TransitionKernel(n, std::move(k));
}

}  // namespace gencert
