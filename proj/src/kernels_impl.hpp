#pragma once

#include "refcon/kernels.hpp"

namespace refcon::kernels::detail {

// Defined in kernels_avx2.cpp; nullptr when AVX2 support is not compiled in.
const KernelTable* avx2_table_if_compiled();

}  // namespace refcon::kernels::detail
