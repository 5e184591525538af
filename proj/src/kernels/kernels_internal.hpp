#pragma once

#include "dsfusion/kernels.hpp"

namespace dsfusion::kernels {

#if defined(DSFUSION_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace dsfusion::kernels
