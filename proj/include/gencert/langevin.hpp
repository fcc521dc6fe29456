#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gencert/divergence.hpp"
#include "gencert/error.hpp"
#include "gencert/rng.hpp"

namespace gencert {

struct BoxDomain {
  std::vector<double> lows;
  std::vector<double> highs;

  static BoxDomain cube(std::size_t dim, double lo, double hi);
  std::size_t dim() const { return lows.size(); }
  double volume() const;
  bool contains(const double* theta) const;
};

void validate(const BoxDomain& box);

enum class DiffusionKind { Unit, Linear, Poly, Exp, Custom };

// sigma^2(theta). The Linear/Poly/Exp kinds are functions of L(theta):
// L + alpha, (L + alpha)^k, exp(alpha L).
struct Diffusion {
  DiffusionKind kind = DiffusionKind::Unit;
  double alpha = 1.0;
  int k = 2;
  std::function<double(const double* theta)> custom;

  bool needs_loss() const { return kind == DiffusionKind::Linear || kind == DiffusionKind::Poly || kind == DiffusionKind::Exp; }
  double sigma2(double loss, const double* theta) const;
};

struct LangevinSystem {
  std::size_t dim = 1;
  std::function<double(const double* theta)> loss;
  std::function<void(const double* theta, double* grad)> grad;
  double beta = 1.0;           // +inf: noise off
  std::vector<double> lambda;  // unbounded mode only; empty means zero
  std::optional<BoxDomain> box;
  Diffusion diffusion;
};

void validate(const LangevinSystem& sys);

// Central-difference check of grad against loss at `probes` random points
// (inside the box, or N(0, I) when unbounded). Returns the worst relative
// error max|g - fd| / max(1, |fd|).
double gradient_consistency(const LangevinSystem& sys, std::size_t probes, std::uint64_t seed);

// Largest finite-difference directional derivative of the drift seen at the
// probe points; dt times this is the stability diagnostic.
double drift_lipschitz_estimate(const LangevinSystem& sys, std::size_t probes, std::uint64_t seed);

struct IntegratorConfig {
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::size_t n_traj = 1;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t chunk = 256;
};

void validate(const IntegratorConfig& cfg);
std::size_t kept_per_trajectory(const IntegratorConfig& cfg);

class TrajectoryDivergence : public NumericalError {
 public:
  TrajectoryDivergence(std::size_t traj, std::size_t step, std::vector<double> theta);
  std::size_t trajectory() const { return traj_; }
  std::size_t step() const { return step_; }
  const std::vector<double>& theta() const { return theta_; }

 private:
  std::size_t traj_, step_;
  std::vector<double> theta_;
};

// Per-coordinate folding into [lo_i, hi_i]; interior points unchanged.
std::vector<double> reflect_into_box(const std::vector<double>& theta, const BoxDomain& box);

// One Euler-Maruyama step, diffusion evaluated at the pre-step point.
std::vector<double> step(const LangevinSystem& sys, const std::vector<double>& theta, double dt, Rng& rng);

struct SampleSet {
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::vector<double> data;  // row-major rows x dim

  const double* row(std::size_t r) const { return data.data() + r * dim; }
};

// Writes the starting point of trajectory `traj` into out[0..dim).
using InitSampler = std::function<void(std::uint64_t traj, const Philox& rng, double* out)>;

InitSampler uniform_box_init(const BoxDomain& box);
InitSampler gaussian_init(std::vector<double> mean, std::vector<double> stddev);
InitSampler point_init(std::vector<double> theta0);

// Samples are stored trajectory-major: row traj * kept + j is the j-th kept
// draw of trajectory traj. Noise for (traj, step) comes from a Philox stream
// keyed by the seed, so the output does not depend on workers or chunk.
SampleSet simulate_ensemble(const LangevinSystem& sys, const InitSampler& init, const IntegratorConfig& cfg);

// Regular grid histogram for dim <= 2; bins are row-major with the first
// coordinate slowest.
FiniteDistribution histogram(const SampleSet& samples, const BoxDomain& box, std::size_t bins_per_dim);

// Bin masses of an (unnormalized) density under per-bin Simpson quadrature.
FiniteDistribution bin_masses(const std::function<double(const double*)>& density, const BoxDomain& box,
                              std::size_t bins_per_dim, std::size_t nodes_per_bin = 17);

struct DensityComparison {
  double tv;
  double kl_discrete;
};

DensityComparison compare_density(const FiniteDistribution& hist, const std::function<double(const double*)>& density,
                                  const BoxDomain& box, std::size_t bins_per_dim, std::size_t n_samples);
DensityComparison compare_masses(const FiniteDistribution& hist, const FiniteDistribution& masses,
                                 std::size_t n_samples);

}  // namespace gencert
