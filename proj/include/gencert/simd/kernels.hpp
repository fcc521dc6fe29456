#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the chain evolution, the Langevin
// ensemble integrator and the MLP/SGLD trainer.
//
// Every kernel has a scalar reference and (on x86-64) an AVX2 variant. The
// two are required to be bit-identical: reductions use the same 16-lane
// partial-sum layout and the same final combination order, and no variant
// uses fused multiply-add. Tests in tests/unit/test_kernels.cpp enforce this.

namespace gencert::simd {

struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // out[r] = dot(W[r, :], x), W row-major rows x cols
  void (*matvec)(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, double* out);

  // out[c] += sum_r u[r] * W[r, c]   (accumulates W^T u, one axpy per row)
  void (*matvec_t_acc)(const double* w, std::size_t rows, std::size_t cols,
                       const double* u, double* out);

  // theta[i] = (theta[i] + drift[i] * dt) + scale[i] * xi[i]
  void (*em_update)(double* theta, const double* drift, const double* scale,
                    const double* xi, double dt, std::size_t n);

  // Folds every x[i] into [lo, hi] by repeated reflection at the faces.
  // Interior points are returned unchanged (bitwise).
  void (*fold_interval)(double* x, double lo, double hi, std::size_t n);

  // theta[i] = ((theta[i] - lr * grad[i]) - decay[i] * theta[i]) + noise * xi[i]
  // decay[i] is the per-parameter lr * lambda_i / beta.
  void (*sgld_update)(double* theta, const double* grad, const double* decay,
                      const double* xi, double lr, double noise, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the build or the host CPU lacks AVX2.
const KernelTable* avx2_kernels();

// The table selected at first use: AVX2 when available, unless the
// environment variable GENCERT_SIMD=scalar forces the reference path.
const KernelTable& active_kernels();

}  // namespace gencert::simd
