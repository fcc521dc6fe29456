#pragma once

#include <cstddef>
#include <vector>

#include "gencert/extended_real.hpp"

namespace gencert {

enum class DivergenceKind { KL, RenyiInf };

inline constexpr double kDistributionTol = 1e-12;

// Probability vector over n states. Construction validates: entries finite
// and >= 0, sum within 1e-12 of one.
class FiniteDistribution {
 public:
  FiniteDistribution() = default;
  explicit FiniteDistribution(std::vector<double> probs);

  static FiniteDistribution uniform(std::size_t n);
  static FiniteDistribution indicator(std::size_t n, std::size_t state);
  // Divides by the sum; the input only has to be nonnegative with positive mass.
  static FiniteDistribution normalized(std::vector<double> weights);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }
  const double* data() const { return p_.data(); }

  bool in_support(std::size_t i) const { return p_[i] > 0.0; }
  std::vector<std::size_t> support() const;

 private:
  std::vector<double> p_;
};

// Psi values in nats. +inf marks states the Gibbs law excludes.
using PotentialVector = std::vector<double>;

// dp = Z^-1 exp(-Psi) dq. The stored potential is canonically shifted so its
// minimum over the base support is 0, and log_partition matches that shift.
struct GibbsSpec {
  FiniteDistribution base;
  PotentialVector potential;
  double log_partition = 0.0;

  FiniteDistribution distribution() const;
};

// Unweighted: KL(p||q) or D_inf(p||q). Weighted by mu: sum_i mu_i ln(p_i/q_i)
// or max over supp(mu) of ln(p_i/q_i). Terms with q_i = 0 < p_i are +inf,
// p_i = 0 < q_i are -inf, and 0/0 contributes 0.
double divergence(DivergenceKind kind, const FiniteDistribution& p, const FiniteDistribution& q);
double divergence(DivergenceKind kind, const FiniteDistribution& p, const FiniteDistribution& q,
                  const FiniteDistribution& weight);

double kl(const FiniteDistribution& p, const FiniteDistribution& q);
double dinf(const FiniteDistribution& p, const FiniteDistribution& q);

GibbsSpec gibbs_from_potential(const FiniteDistribution& base, const PotentialVector& potential);
PotentialVector potential_from_pair(const FiniteDistribution& p, const FiniteDistribution& q);

// E_w[f] over supp(w); +inf values on the support propagate.
double expectation(const FiniteDistribution& w, const std::vector<double>& f);
double max_over_support(const FiniteDistribution& w, const std::vector<double>& f);
double min_over_support(const FiniteDistribution& w, const std::vector<double>& f);

struct SymmetricIdentity {
  double kl_lhs, kl_rhs;
  double dinf_lhs, dinf_rhs;
};

// Both sides of KL_mu(p||q) + KL_nu(q||p) = E_nu Psi - E_mu Psi and the D_inf
// analogue. Requires p = Gibbs(q, Psi) to 1e-10 and supp(mu), supp(nu) within
// supp(q).
SymmetricIdentity symmetric_identity(const FiniteDistribution& p, const FiniteDistribution& q,
                                     const PotentialVector& psi, const FiniteDistribution& mu,
                                     const FiniteDistribution& nu);

double max_abs_diff(const FiniteDistribution& a, const FiniteDistribution& b);

}  // namespace gencert
