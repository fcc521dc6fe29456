#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>

namespace gencert {

// Ridge regression trained by CLD: L_S(theta) = ||X theta - y||^2 / (2N),
// drift -grad L_S - (lambda / beta) theta, diffusion 2 / beta.
struct RegressionProblem {
  Eigen::MatrixXd x;  // N x d
  Eigen::VectorXd y;
  Eigen::VectorXd theta_star;
  double sigma = 0.0;
  double lambda = 1.0;
  double beta = 1.0;  // +inf allowed

  std::size_t n() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(x.cols()); }
  Eigen::MatrixXd a() const;  // X^T X / N
  double alpha() const;       // lambda / beta
  Eigen::VectorXd theta_ls() const;
  double train_loss(const Eigen::VectorXd& theta) const;
  double pop_loss(const Eigen::VectorXd& theta) const;
};

void validate(const RegressionProblem& p);

// X i.i.d. N(0,1), theta* uniform on the unit sphere, y = X theta* + sigma eps.
RegressionProblem generate_problem(std::size_t n, std::size_t d, double sigma, double lambda, double beta,
                                   std::uint64_t seed);

struct StationaryGaussian {
  Eigen::VectorXd mean;  // (A + alpha I)^-1 X^T y / N
  Eigen::MatrixXd cov;   // (A + alpha I)^-1 / beta
};

StationaryGaussian posterior_gaussian(const RegressionProblem& p);

struct LossPair {
  double train;
  double pop;
};

// E[L_S(theta_inf) | X] and E[L_D(theta_inf) | X]; the label noise is
// averaged out, only the design is held fixed.
LossPair closed_form_losses(const RegressionProblem& p);

// Same expectations with the labels held fixed at p.y.
LossPair conditional_losses(const RegressionProblem& p);

enum class LabelNoise { Resample, Fixed };

struct McLosses {
  double train, pop;
  double se_train, se_pop;
};

// Monte Carlo over theta ~ N(theta_bar, Sigma) via the symmetric square root
// of Sigma. With LabelNoise::Resample every draw also redraws y = X theta* +
// sigma eps, which makes the estimate comparable with closed_form_losses.
McLosses mc_losses(const RegressionProblem& p, std::size_t n_samples, std::uint64_t seed,
                   LabelNoise noise = LabelNoise::Resample);

LossPair asymptotic_losses(std::size_t d, double beta, double sigma, std::size_t n);

struct SdeOracleConfig {
  double dt = 0.01;
  double t_burn = 20.0;      // time discarded
  double t_sample = 20.0;    // time sampled after burn-in
  double t_thin = 0.5;       // time between kept draws
  std::size_t label_draws = 200;
  std::size_t traj_per_draw = 50;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct SdeOracleResult {
  double train, pop;
  double se_train, se_pop;
  double spectral_step;  // ||I - dt (A + alpha I)||_2
};

// Simulates the CLD SDE with the Langevin integrator; labels are redrawn per
// replicate and every replicate runs its own ensemble from theta = 0.
SdeOracleResult sde_oracle_losses(const RegressionProblem& p, const SdeOracleConfig& cfg);

struct InitLossEstimate {
  double mean, se, max_observed;
  double exact;  // tr(A) / (2 lambda) + ||y||^2 / (2N)
};

// E_{p0} L_S with p0 = N(0, I / lambda).
InitLossEstimate linreg_init_loss(const RegressionProblem& p, std::size_t n_draws, std::uint64_t seed);

}  // namespace gencert
