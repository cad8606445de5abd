#pragma once

#include "attrdesc/simd/kernels.hpp"

namespace attrdesc::simd::detail {

void mirror_upper(double* g, std::size_t d);

extern const KernelTable kScalarTable;
#if ATTRDESC_HAVE_AVX2
extern const KernelTable kAvx2Table;
#endif

}  // namespace attrdesc::simd::detail
