#pragma once

#include <cstddef>
#include <optional>

namespace gencert {

enum class BoundMode { Mean, Single };

struct BoundInputs {
  double n = 0;  // sample count N, an integer > 1
  double delta = 0.05;
  double kl_init = 0.0;
  double dinf_init = 0.0;
  double mean_potential = 0.0;
  double sup_potential = 0.0;
};

void validate(const BoundInputs& in);

// ln(1/delta) straight from delta, accurate down to delta ~ 1e-300.
double log_inv_delta(double delta);

// sqrt((KL(p0||nu) + E_p0 Psi + ln(1/delta)) / N)
double gap_bound_mean(const BoundInputs& in);
// sqrt((Dinf(p0||nu) + sup_p0 Psi + ln(1/delta)) / N)
double gap_bound_single(const BoundInputs& in);

// sqrt((beta * init_loss + ln(1/delta)) / (2N)). beta may be +inf, giving +inf.
double cld_bound(BoundMode mode, double beta, double init_loss, double n, double delta);

// Largest beta with cld_bound(beta) < target, i.e. beta * init_loss <
// 2 N target^2 - ln(1/delta). Returns 0 if no beta > 0 qualifies and +inf
// when init_loss is 0 and the delta term alone already fits.
double cld_beta_threshold(double target, double init_loss, double n, double delta);

double restricted_box_bound(BoundMode mode, double beta, double init_loss, double vol_theta, double vol_theta0,
                            double n, double delta);
// Same as above with ln(|Theta| / |Theta0|) given directly; for
// high-dimensional boxes the volumes themselves overflow.
double restricted_box_bound_logratio(BoundMode mode, double beta, double init_loss, double log_vol_ratio, double n,
                                     double delta);

// KL(N(0, diag 1/lambda0) || N(0, diag 1/lambda1)).
double gaussian_mismatch_kl(const double* lambda0, const double* lambda1, std::size_t d);

// Bernoulli relative entropy kl(a || b), +inf when b in {0, 1} excludes a.
double binary_kl(double a, double b);

// sup{ b in [a, 1] : kl(a || b) <= budget }. Bisection runs until the
// bracket stops shrinking in double precision (at most 200 halvings).
double invert_binary_kl_upper(double a, double budget);

struct KlFormResult {
  double kl_budget_per_sample;
  double inverted_bound;
  double fast_gap_bound;
};

KlFormResult kl_form_bounds(BoundMode mode, double divergence_budget, double empirical_error, double n,
                            double delta);

struct BoundReport {
  BoundInputs inputs;
  double bound_mean = 0.0;
  double bound_single = 0.0;
  std::optional<double> empirical_error;
  std::optional<double> bound_fast_mean;
  std::optional<double> bound_fast_single;
};

BoundReport certificate(const BoundInputs& in, std::optional<double> empirical_error = std::nullopt);

}  // namespace gencert
