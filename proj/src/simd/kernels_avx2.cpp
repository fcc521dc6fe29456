#include <immintrin.h>

#include "kernels_internal.hpp"

namespace gencert::simd::detail {
namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    acc2 = _mm256_add_pd(acc2, _mm256_mul_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8)));
    acc3 = _mm256_add_pd(acc3, _mm256_mul_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12)));
  }
  const __m256d t = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, t);
  double r = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    const double p = a[i] * b[i];
    r = r + p;
  }
  return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
  }
  for (; i < n; ++i) {
    const double p = alpha * x[i];
    y[i] = y[i] + p;
  }
}

void matvec_avx2(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx2(w + r * cols, x, cols);
}

void matvec_t_acc_avx2(const double* w, std::size_t rows, std::size_t cols,
                       const double* u, double* out) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(u[r], w + r * cols, out, cols);
}

void em_update_avx2(double* theta, const double* drift, const double* scale,
                    const double* xi, double dt, std::size_t n) {
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_mul_pd(_mm256_loadu_pd(drift + i), vdt);
    const __m256d s = _mm256_mul_pd(_mm256_loadu_pd(scale + i), _mm256_loadu_pd(xi + i));
    _mm256_storeu_pd(theta + i, _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(theta + i), d), s));
  }
  for (; i < n; ++i) {
    const double d = drift[i] * dt;
    const double s = scale[i] * xi[i];
    theta[i] = (theta[i] + d) + s;
  }
}

void fold_interval_avx2(double* x, double lo, double hi, std::size_t n) {
  const double w = hi - lo;
  const double period = w + w;
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  const __m256d vw = _mm256_set1_pd(w);
  const __m256d vp = _mm256_set1_pd(period);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d inside = _mm256_and_pd(_mm256_cmp_pd(v, vlo, _CMP_GE_OQ),
                                         _mm256_cmp_pd(v, vhi, _CMP_LE_OQ));
    if (_mm256_movemask_pd(inside) == 0xF) continue;
    const __m256d y = _mm256_sub_pd(v, vlo);
    const __m256d k = _mm256_floor_pd(_mm256_div_pd(y, vp));
    __m256d r = _mm256_sub_pd(y, _mm256_mul_pd(vp, k));
    const __m256d upper = _mm256_cmp_pd(r, vw, _CMP_GT_OQ);
    r = _mm256_blendv_pd(r, _mm256_sub_pd(vp, r), upper);
    __m256d out = _mm256_add_pd(vlo, r);
    out = _mm256_blendv_pd(out, vlo, _mm256_cmp_pd(out, vlo, _CMP_LT_OQ));
    out = _mm256_blendv_pd(out, vhi, _mm256_cmp_pd(out, vhi, _CMP_GT_OQ));
    _mm256_storeu_pd(x + i, _mm256_blendv_pd(out, v, inside));
  }
  for (; i < n; ++i) {
    const double v = x[i];
    if (v >= lo && v <= hi) continue;
    const double y = v - lo;
    const double k = __builtin_floor(y / period);
    double r = y - period * k;
    if (r > w) r = period - r;
    double out = lo + r;
    if (out < lo) out = lo;
    if (out > hi) out = hi;
    x[i] = out;
  }
}

void sgld_update_avx2(double* theta, const double* grad, const double* decay,
                      const double* xi, double lr, double noise, std::size_t n) {
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d vn = _mm256_set1_pd(noise);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d th = _mm256_loadu_pd(theta + i);
    const __m256d g = _mm256_mul_pd(vlr, _mm256_loadu_pd(grad + i));
    const __m256d d = _mm256_mul_pd(_mm256_loadu_pd(decay + i), th);
    const __m256d s = _mm256_mul_pd(vn, _mm256_loadu_pd(xi + i));
    _mm256_storeu_pd(theta + i, _mm256_add_pd(_mm256_sub_pd(_mm256_sub_pd(th, g), d), s));
  }
  for (; i < n; ++i) {
    const double g = lr * grad[i];
    const double d = decay[i] * theta[i];
    const double s = noise * xi[i];
    theta[i] = ((theta[i] - g) - d) + s;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      "avx2",          dot_avx2,           axpy_avx2,
      matvec_avx2,     matvec_t_acc_avx2,  em_update_avx2,
      fold_interval_avx2, sgld_update_avx2,
  };
  return table;
}

}  // namespace gencert::simd::detail
