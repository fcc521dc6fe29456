#include "gencert/simd/kernels.hpp"

#include <cmath>

namespace gencert::simd {
namespace {

// Mirrors the AVX2 reduction: four 4-wide accumulators fed in 16-element
// blocks, combined as (a0+a1)+(a2+a3) lane-wise, then (l0+l1)+(l2+l3),
// then the tail in order.
double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s[16] = {};
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    for (int j = 0; j < 16; ++j) {
      const double p = a[i + j] * b[i + j];
      s[j] = s[j] + p;
    }
  }
  double t[4];
  for (int j = 0; j < 4; ++j) t[j] = (s[j] + s[4 + j]) + (s[8 + j] + s[12 + j]);
  double r = (t[0] + t[1]) + (t[2] + t[3]);
  for (; i < n; ++i) {
    const double p = a[i] * b[i];
    r = r + p;
  }
  return r;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double p = alpha * x[i];
    y[i] = y[i] + p;
  }
}

void matvec_scalar(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(w + r * cols, x, cols);
}

void matvec_t_acc_scalar(const double* w, std::size_t rows, std::size_t cols,
                         const double* u, double* out) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(u[r], w + r * cols, out, cols);
}

void em_update_scalar(double* theta, const double* drift, const double* scale,
                      const double* xi, double dt, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = drift[i] * dt;
    const double s = scale[i] * xi[i];
    theta[i] = (theta[i] + d) + s;
  }
}

void fold_interval_scalar(double* x, double lo, double hi, std::size_t n) {
  const double w = hi - lo;
  const double period = w + w;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i];
    if (v >= lo && v <= hi) continue;
    const double y = v - lo;
    const double k = std::floor(y / period);
    double r = y - period * k;
    if (r > w) r = period - r;
    double out = lo + r;
    if (out < lo) out = lo;
    if (out > hi) out = hi;
    x[i] = out;
  }
}

void sgld_update_scalar(double* theta, const double* grad, const double* decay,
                        const double* xi, double lr, double noise, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = lr * grad[i];
    const double d = decay[i] * theta[i];
    const double s = noise * xi[i];
    theta[i] = ((theta[i] - g) - d) + s;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",          dot_scalar,           axpy_scalar,
      matvec_scalar,     matvec_t_acc_scalar,  em_update_scalar,
      fold_interval_scalar, sgld_update_scalar,
  };
  return table;
}

}  // namespace gencert::simd
