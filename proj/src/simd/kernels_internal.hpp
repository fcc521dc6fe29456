#pragma once

#include "gencert/simd/kernels.hpp"

namespace gencert::simd::detail {

const KernelTable& avx2_table();

}  // namespace gencert::simd::detail
