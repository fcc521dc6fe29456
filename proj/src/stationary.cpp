#include "gencert/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gencert/error.hpp"
#include "gencert/extended_real.hpp"

namespace gencert {

void validate(const NoiseScaleParams& p) {
  require(std::isfinite(p.beta) && p.beta > 0.0, "beta must be positive and finite");
  if (p.kind != NoiseKind::Uniform) require(std::isfinite(p.alpha) && p.alpha > 0.0, "alpha must be positive");
  if (p.kind == NoiseKind::Poly) require(p.k >= 2, "polynomial noise needs k >= 2");
}

double noise_sigma2(const NoiseScaleParams& p, double loss) {
  switch (p.kind) {
    case NoiseKind::Uniform: return 1.0;
    case NoiseKind::Linear: return loss + p.alpha;
    case NoiseKind::Poly: return std::pow(loss + p.alpha, p.k);
    case NoiseKind::Exp: return std::exp(p.alpha * loss);
  }
  return 1.0;
}

double potential(const NoiseScaleParams& p, double loss) {
  validate(p);
  require(loss >= 0.0, "loss must be nonnegative");
  const double a = p.alpha, b = p.beta;
  switch (p.kind) {
    case NoiseKind::Uniform: return b * loss;
    case NoiseKind::Linear: return (b + 1.0) * std::log1p(loss / a);
    case NoiseKind::Poly: {
      const double e = 1.0 - p.k;
      return p.k * std::log1p(loss / a) + (b / (p.k - 1.0)) * (std::pow(a, e) - std::pow(loss + a, e));
    }
    case NoiseKind::Exp: return a * loss - (b / a) * std::expm1(-a * loss);
  }
  return 0.0;
}

double potential_derivative(const NoiseScaleParams& p, double loss) {
  validate(p);
  const double a = p.alpha, b = p.beta;
  switch (p.kind) {
    case NoiseKind::Uniform: return b;
    case NoiseKind::Linear: return (b + 1.0) / (loss + a);
    case NoiseKind::Poly: return p.k / (loss + a) + b * std::pow(loss + a, -static_cast<double>(p.k));
    case NoiseKind::Exp: return a + b * std::exp(-a * loss);
  }
  return 0.0;
}

double GridDensity::operator()(double t) const {
  if (x.empty() || t < x.front() || t > x.back()) return 0.0;
  const double u = (t - x.front()) / h;
  auto i = static_cast<std::size_t>(u);
  if (i + 1 >= x.size()) return p.back();
  const double f = u - static_cast<double>(i);
  return (1.0 - f) * p[i] + f * p[i + 1];
}

std::vector<double> simpson_weights(std::size_t n, double h) {
  require(n >= 3 && n % 2 == 1, "Simpson's rule needs an odd number of nodes >= 3");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
  for (auto& v : w) v *= h / 3.0;
  return w;
}

namespace {

std::vector<double> grid(double lo, double hi, std::size_t n) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "need a finite interval lo < hi");
  std::vector<double> x(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + h * static_cast<double>(i);
  x.back() = hi;
  return x;
}

// Turns log-density values into a unit-mass GridDensity.
GridDensity from_log_values(std::vector<double> x, const std::vector<double>& logp) {
  GridDensity d;
  d.h = x[1] - x[0];
  const double m = *std::max_element(logp.begin(), logp.end());
  d.p.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d.p[i] = std::exp(logp[i] - m);
  const auto w = simpson_weights(x.size(), d.h);
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * d.p[i];
  if (!(z > 0.0) || !std::isfinite(z)) throw NumericalError("density has no finite positive mass on the grid");
  for (auto& v : d.p) v /= z;
  d.x = std::move(x);
  return d;
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double t : v) s += std::exp(t - m);
  return m + std::log(s);
}

double log_partition_once(const std::function<double(double)>& psi, const std::function<double(double)>& base,
                          double lo, double hi, std::size_t n) {
  const auto x = grid(lo, hi, n);
  const auto w = simpson_weights(n, x[1] - x[0]);
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = base(x[i]);
    require(b >= 0.0, "base density must be nonnegative");
    terms[i] = b > 0.0 ? std::log(w[i]) + std::log(b) - psi(x[i]) : -kInf;
  }
  return log_sum_exp(terms);
}

double log_partition_2d_once(const std::function<double(double, double)>& psi,
                             const std::function<double(double, double)>& base, double lo0, double hi0, double lo1,
                             double hi1, std::size_t n) {
  const auto x = grid(lo0, hi0, n);
  const auto y = grid(lo1, hi1, n);
  const auto wx = simpson_weights(n, x[1] - x[0]);
  const auto wy = simpson_weights(n, y[1] - y[0]);
  std::vector<double> terms(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double b = base(x[i], y[j]);
      require(b >= 0.0, "base density must be nonnegative");
      terms[i * n + j] = b > 0.0 ? std::log(wx[i] * wy[j]) + std::log(b) - psi(x[i], y[j]) : -kInf;
    }
  return log_sum_exp(terms);
}

std::size_t coarse_size(std::size_t n) {
  std::size_t c = n / 2;
  if (c % 2 == 0) ++c;
  return std::max<std::size_t>(c, 3);
}

void check_refinement(double fine, double coarse) {
  if (!std::isfinite(fine) || !std::isfinite(coarse) || std::abs(fine - coarse) > 1e-4)
    throw NumericalError("log-partition quadrature does not converge under grid refinement (fine " +
                         std::to_string(fine) + ", coarse " + std::to_string(coarse) + ")");
}

}  // namespace

GridDensity stationary_density_1d(const Loss1D& loss, const std::function<double(double)>& sigma2, double beta,
                                  double lo, double hi, std::size_t n_grid) {
  require(n_grid >= 3 && n_grid % 2 == 1, "n_grid must be odd and >= 3");
  require(std::isfinite(beta) && beta >= 0.0, "beta must be finite and nonnegative");
  auto x = grid(lo, hi, n_grid);
  const double h = x[1] - x[0];
  std::vector<double> s2(n_grid), f(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    s2[i] = sigma2(x[i]);
    if (!(s2[i] > 0.0) || !std::isfinite(s2[i]))
      throw ValidationError("sigma^2 must be positive on the domain (fails at x = " + std::to_string(x[i]) + ")");
    f[i] = loss.derivative(x[i]) / s2[i];
  }
  // Cumulative integral: Simpson pairs at even nodes, the one-interval
  // three-point rule h/12 (5 f0 + 8 f1 - f2) at odd nodes.
  std::vector<double> big_f(n_grid, 0.0);
  for (std::size_t i = 1; i < n_grid; ++i) {
    if (i % 2 == 0) {
      big_f[i] = big_f[i - 2] + (h / 3.0) * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    } else {
      big_f[i] = big_f[i - 1] + (h / 12.0) * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
    }
  }
  std::vector<double> logp(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) logp[i] = -beta * big_f[i] - std::log(s2[i]);
  return from_log_values(std::move(x), logp);
}

GridDensity analytic_density_1d(const NoiseScaleParams& params, const std::function<double(double)>& loss, double lo,
                                double hi, std::size_t n_grid) {
  validate(params);
  require(n_grid >= 3 && n_grid % 2 == 1, "n_grid must be odd and >= 3");
  auto x = grid(lo, hi, n_grid);
  std::vector<double> logp(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) logp[i] = -potential(params, loss(x[i]));
  return from_log_values(std::move(x), logp);
}

double log_partition(const std::function<double(double)>& psi, const std::function<double(double)>& base_density,
                     double lo, double hi, std::size_t n_grid) {
  const double fine = log_partition_once(psi, base_density, lo, hi, n_grid);
  check_refinement(fine, log_partition_once(psi, base_density, lo, hi, coarse_size(n_grid)));
  return fine;
}

double log_partition_2d(const std::function<double(double, double)>& psi,
                        const std::function<double(double, double)>& base_density, double lo0, double hi0,
                        double lo1, double hi1, std::size_t n_grid) {
  const double fine = log_partition_2d_once(psi, base_density, lo0, hi0, lo1, hi1, n_grid);
  check_refinement(fine, log_partition_2d_once(psi, base_density, lo0, hi0, lo1, hi1, coarse_size(n_grid)));
  return fine;
}

}  // namespace gencert
