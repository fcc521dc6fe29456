#include "gencert/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gencert/error.hpp"

namespace gencert {

FiniteDistribution::FiniteDistribution(std::vector<double> probs) : p_(std::move(probs)) {
  require(!p_.empty(), "distribution must have at least one state");
  double sum = 0.0;
  for (double v : p_) {
    require(std::isfinite(v) && v >= 0.0, "distribution entries must be finite and nonnegative");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= kDistributionTol,
          "distribution must sum to 1 (got " + std::to_string(sum) + ")");
}

FiniteDistribution FiniteDistribution::uniform(std::size_t n) {
  require(n > 0, "uniform distribution needs n > 0");
  return FiniteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

FiniteDistribution FiniteDistribution::indicator(std::size_t n, std::size_t state) {
  require(state < n, "indicator state out of range");
  std::vector<double> p(n, 0.0);
  p[state] = 1.0;
  return FiniteDistribution(std::move(p));
}

FiniteDistribution FiniteDistribution::normalized(std::vector<double> w) {
  double sum = 0.0;
  for (double v : w) {
    require(std::isfinite(v) && v >= 0.0, "weights must be finite and nonnegative");
    sum += v;
  }
  require(sum > 0.0, "weights have zero total mass");
  for (double& v : w) v /= sum;
  return FiniteDistribution(std::move(w));
}

std::vector<std::size_t> FiniteDistribution::support() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < p_.size(); ++i)
    if (p_[i] > 0.0) s.push_back(i);
  return s;
}

namespace {

void check_same_size(const FiniteDistribution& a, const FiniteDistribution& b) {
  require(a.size() == b.size(), "distributions have different numbers of states (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

double log_ratio(double p, double q) {
  if (p == 0.0 && q == 0.0) return 0.0;
  if (q == 0.0) return kInf;
  if (p == 0.0) return -kInf;
  return std::log(p / q);
}

double weighted_kl(const FiniteDistribution& p, const FiniteDistribution& q, const FiniteDistribution& w) {
  double sum = 0.0;
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (w[i] == 0.0) continue;
    const double r = log_ratio(p[i], q[i]);
    if (r == kInf) pos = true;
    else if (r == -kInf) neg = true;
    else sum += w[i] * r;
  }
  if (pos && neg) throw NumericalError("weighted KL is indeterminate (+inf and -inf terms)");
  if (pos) return kInf;
  if (neg) return -kInf;
  return sum;
}

double weighted_dinf(const FiniteDistribution& p, const FiniteDistribution& q, const FiniteDistribution& w) {
  double best = -kInf;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (w[i] == 0.0) continue;
    best = std::max(best, log_ratio(p[i], q[i]));
  }
  return best;
}

}  // namespace

double divergence(DivergenceKind kind, const FiniteDistribution& p, const FiniteDistribution& q,
                  const FiniteDistribution& weight) {
  check_same_size(p, q);
  check_same_size(p, weight);
  return kind == DivergenceKind::KL ? weighted_kl(p, q, weight) : weighted_dinf(p, q, weight);
}

double divergence(DivergenceKind kind, const FiniteDistribution& p, const FiniteDistribution& q) {
  return divergence(kind, p, q, p);
}

double kl(const FiniteDistribution& p, const FiniteDistribution& q) {
  return divergence(DivergenceKind::KL, p, q);
}

double dinf(const FiniteDistribution& p, const FiniteDistribution& q) {
  return divergence(DivergenceKind::RenyiInf, p, q);
}

GibbsSpec gibbs_from_potential(const FiniteDistribution& base, const PotentialVector& potential) {
  require(potential.size() == base.size(), "potential length does not match the base distribution");
  double shift = kInf;
  for (std::size_t i = 0; i < base.size(); ++i) {
    require(!std::isnan(potential[i]) && potential[i] != -kInf, "potential entries must be > -inf");
    if (base.in_support(i)) shift = std::min(shift, potential[i]);
  }
  if (shift == kInf) throw ValidationError("Gibbs law excludes every state of the base support (Z = 0)");

  GibbsSpec g{base, potential, 0.0};
  double z = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    g.potential[i] = potential[i] - shift;
    if (base.in_support(i) && g.potential[i] != kInf) z += base[i] * std::exp(-g.potential[i]);
  }
  g.log_partition = std::log(z);
  return g;
}

FiniteDistribution GibbsSpec::distribution() const {
  std::vector<double> w(base.size(), 0.0);
  for (std::size_t i = 0; i < base.size(); ++i)
    if (base.in_support(i) && potential[i] != kInf) w[i] = base[i] * std::exp(-potential[i]);
  return FiniteDistribution::normalized(std::move(w));
}

PotentialVector potential_from_pair(const FiniteDistribution& p, const FiniteDistribution& q) {
  check_same_size(p, q);
  PotentialVector psi(p.size(), kInf);
  double lo = kInf;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.in_support(i) != q.in_support(i))
      throw ValidationError("p and q are not mutually absolutely continuous (state " + std::to_string(i) + ")");
    if (!p.in_support(i)) continue;
    psi[i] = std::log(q[i]) - std::log(p[i]);
    lo = std::min(lo, psi[i]);
  }
  for (double& v : psi)
    if (v != kInf) v -= lo;
  return psi;
}

double expectation(const FiniteDistribution& w, const std::vector<double>& f) {
  require(f.size() == w.size(), "function length does not match distribution");
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    if (f[i] == kInf) return kInf;
    s += w[i] * f[i];
  }
  return s;
}

double max_over_support(const FiniteDistribution& w, const std::vector<double>& f) {
  require(f.size() == w.size(), "function length does not match distribution");
  double m = -kInf;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) m = std::max(m, f[i]);
  return m;
}

double min_over_support(const FiniteDistribution& w, const std::vector<double>& f) {
  require(f.size() == w.size(), "function length does not match distribution");
  double m = kInf;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) m = std::min(m, f[i]);
  return m;
}

double max_abs_diff(const FiniteDistribution& a, const FiniteDistribution& b) {
  check_same_size(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SymmetricIdentity symmetric_identity(const FiniteDistribution& p, const FiniteDistribution& q,
                                     const PotentialVector& psi, const FiniteDistribution& mu,
                                     const FiniteDistribution& nu) {
  check_same_size(p, q);
  check_same_size(p, mu);
  check_same_size(p, nu);
  for (std::size_t i = 0; i < q.size(); ++i) {
    require(q.in_support(i) || (mu[i] == 0.0 && nu[i] == 0.0),
            "mu and nu must be supported inside supp(q)");
    require(!q.in_support(i) || std::isfinite(psi[i]), "potential must be finite on supp(q)");
  }
  const FiniteDistribution implied = gibbs_from_potential(q, psi).distribution();
  if (max_abs_diff(implied, p) > 1e-10) throw ValidationError("p is not Gibbs with respect to q for the given potential");

  SymmetricIdentity r{};
  r.kl_lhs = divergence(DivergenceKind::KL, p, q, mu) + divergence(DivergenceKind::KL, q, p, nu);
  r.kl_rhs = expectation(nu, psi) - expectation(mu, psi);
  r.dinf_lhs = divergence(DivergenceKind::RenyiInf, p, q, mu) + divergence(DivergenceKind::RenyiInf, q, p, nu);
  r.dinf_rhs = max_over_support(nu, psi) - min_over_support(mu, psi);
  return r;
}

}  // namespace gencert
