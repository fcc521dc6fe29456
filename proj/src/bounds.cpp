#include "gencert/bounds.hpp"

#include <cmath>

#include "gencert/error.hpp"
#include "gencert/extended_real.hpp"

namespace gencert {

namespace {

void check_n_delta(double n, double delta) {
  require(std::isfinite(n) && n > 1.0 && std::floor(n) == n, "N must be an integer greater than 1");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
}

void check_nonneg(double v, const char* what) {
  require(!std::isnan(v) && v >= 0.0, std::string(what) + " must be nonnegative");
}

}  // namespace

void validate(const BoundInputs& in) {
  check_n_delta(in.n, in.delta);
  check_nonneg(in.kl_init, "kl_init");
  check_nonneg(in.dinf_init, "dinf_init");
  check_nonneg(in.mean_potential, "mean_potential");
  check_nonneg(in.sup_potential, "sup_potential");
}

double log_inv_delta(double delta) { return -std::log(delta); }

double gap_bound_mean(const BoundInputs& in) {
  validate(in);
  return std::sqrt((in.kl_init + in.mean_potential + log_inv_delta(in.delta)) / in.n);
}

double gap_bound_single(const BoundInputs& in) {
  validate(in);
  return std::sqrt((in.dinf_init + in.sup_potential + log_inv_delta(in.delta)) / in.n);
}

double restricted_box_bound_logratio(BoundMode, double beta, double init_loss, double log_vol_ratio, double n,
                                     double delta) {
  check_n_delta(n, delta);
  check_nonneg(beta, "beta");
  check_nonneg(init_loss, "init_loss");
  check_nonneg(log_vol_ratio, "log volume ratio");
  // beta = inf with zero init loss: the potential term vanishes identically.
  const double potential = init_loss == 0.0 ? 0.0 : beta * init_loss;
  return std::sqrt((potential + log_vol_ratio + log_inv_delta(delta)) / (2.0 * n));
}

double cld_bound(BoundMode mode, double beta, double init_loss, double n, double delta) {
  return restricted_box_bound_logratio(mode, beta, init_loss, 0.0, n, delta);
}

double restricted_box_bound(BoundMode mode, double beta, double init_loss, double vol_theta, double vol_theta0,
                            double n, double delta) {
  require(vol_theta0 > 0.0 && vol_theta0 <= vol_theta && std::isfinite(vol_theta),
          "volumes must satisfy 0 < |Theta0| <= |Theta| < inf");
  return restricted_box_bound_logratio(mode, beta, init_loss, std::log(vol_theta / vol_theta0), n, delta);
}

double cld_beta_threshold(double target, double init_loss, double n, double delta) {
  check_n_delta(n, delta);
  check_nonneg(init_loss, "init_loss");
  require(target > 0.0, "target must be positive");
  const double room = 2.0 * n * target * target - log_inv_delta(delta);
  if (room <= 0.0) return 0.0;
  if (init_loss == 0.0) return kInf;
  return room / init_loss;
}

double gaussian_mismatch_kl(const double* lambda0, const double* lambda1, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    require(lambda0[i] > 0.0 && lambda1[i] > 0.0 && std::isfinite(lambda0[i]) && std::isfinite(lambda1[i]),
            "precisions must be positive and finite");
    const double r = lambda1[i] / lambda0[i];
    s += r - 1.0 - std::log(r);
  }
  return 0.5 * s;
}

double binary_kl(double a, double b) {
  require(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0, "binary_kl arguments must lie in [0, 1]");
  auto term = [](double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return kInf;
    return x * std::log(x / y);
  };
  return term(a, b) + term(1.0 - a, 1.0 - b);
}

double invert_binary_kl_upper(double a, double budget) {
  require(a >= 0.0 && a <= 1.0, "empirical error must lie in [0, 1]");
  require(!std::isnan(budget) && budget >= 0.0, "budget must be nonnegative");
  if (budget == 0.0 || a == 1.0) return a;
  if (binary_kl(a, 1.0) <= budget) return 1.0;
  double lo = a, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (binary_kl(a, mid) <= budget) lo = mid;
    else hi = mid;
  }
  return lo;
}

KlFormResult kl_form_bounds(BoundMode, double divergence_budget, double empirical_error, double n, double delta) {
  require(std::isfinite(n) && n >= 8.0 && std::floor(n) == n, "kl-form bounds need integer N >= 8");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  check_nonneg(divergence_budget, "divergence budget");
  require(empirical_error >= 0.0 && empirical_error <= 1.0, "empirical error must lie in [0, 1]");
  KlFormResult r{};
  r.kl_budget_per_sample = (divergence_budget + std::log(2.0 * std::sqrt(n)) + log_inv_delta(delta)) / n;
  r.inverted_bound = invert_binary_kl_upper(empirical_error, r.kl_budget_per_sample);
  r.fast_gap_bound = std::sqrt(2.0 * empirical_error * r.kl_budget_per_sample) + 2.0 * r.kl_budget_per_sample;
  return r;
}

BoundReport certificate(const BoundInputs& in, std::optional<double> empirical_error) {
  BoundReport r;
  r.inputs = in;
  r.bound_mean = gap_bound_mean(in);
  r.bound_single = gap_bound_single(in);
  r.empirical_error = empirical_error;
  if (empirical_error) {
    r.bound_fast_mean = kl_form_bounds(BoundMode::Mean, in.kl_init + in.mean_potential, *empirical_error, in.n,
                                       in.delta).fast_gap_bound;
    r.bound_fast_single = kl_form_bounds(BoundMode::Single, in.dinf_init + in.sup_potential, *empirical_error,
                                         in.n, in.delta).fast_gap_bound;
  }
  return r;
}

}  // namespace gencert
