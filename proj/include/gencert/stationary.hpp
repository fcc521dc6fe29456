#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace gencert {

enum class NoiseKind { Uniform, Linear, Poly, Exp };

// sigma^2 as a function of the loss value:
//   Uniform 1, Linear L + alpha, Poly (L + alpha)^k, Exp exp(alpha L).
struct NoiseScaleParams {
  NoiseKind kind = NoiseKind::Uniform;
  double alpha = 1.0;
  int k = 2;
  double beta = 1.0;
};

void validate(const NoiseScaleParams& p);

double noise_sigma2(const NoiseScaleParams& p, double loss);

// Stationary potential as a function of the loss value, shifted so Psi(0) = 0.
double potential(const NoiseScaleParams& p, double loss);
// dPsi/dL
double potential_derivative(const NoiseScaleParams& p, double loss);

struct Loss1D {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

struct GridDensity {
  std::vector<double> x;
  std::vector<double> p;  // normalized to unit Simpson mass on [x.front(), x.back()]
  double h = 0.0;
  // Linear interpolation between grid nodes; 0 outside.
  double operator()(double t) const;
};

// Composite Simpson weights for an odd number of nodes with spacing h.
std::vector<double> simpson_weights(std::size_t n, double h);

// p(x) proportional to exp(-beta * int_lo^x L'(u)/sigma2(u) du) / sigma2(x).
// The integral is accumulated with Simpson's rule; n_grid must be odd.
GridDensity stationary_density_1d(const Loss1D& loss, const std::function<double(double)>& sigma2, double beta,
                                  double lo, double hi, std::size_t n_grid = 2001);

// exp(-Psi(L(x))) on the same grid, normalized the same way.
GridDensity analytic_density_1d(const NoiseScaleParams& params, const std::function<double(double)>& loss,
                                double lo, double hi, std::size_t n_grid = 2001);

// ln int base(x) exp(-Psi(x)) dx by log-sum-exp over Simpson weights. A
// second pass on a grid of about half the size must agree to 1e-4, otherwise
// NumericalError is thrown.
double log_partition(const std::function<double(double)>& psi, const std::function<double(double)>& base_density,
                     double lo, double hi, std::size_t n_grid = 2001);
double log_partition_2d(const std::function<double(double, double)>& psi,
                        const std::function<double(double, double)>& base_density, double lo0, double hi0,
                        double lo1, double hi1, std::size_t n_grid = 401);

}  // namespace gencert
