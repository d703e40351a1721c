#ifndef AUDIOZOOM_SRC_SIMD_KERNEL_VARIANTS_H_
#define AUDIOZOOM_SRC_SIMD_KERNEL_VARIANTS_H_

#include "audiozoom/simd/kernels.h"

namespace azoom::simd {

extern const KernelTable kScalarKernels;
#if defined(AUDIOZOOM_HAVE_AVX2_KERNELS)
extern const KernelTable kAvx2Kernels;
#endif
#if defined(AUDIOZOOM_HAVE_NEON_KERNELS)
extern const KernelTable kNeonKernels;
#endif

}  // namespace azoom::simd

#endif  // AUDIOZOOM_SRC_SIMD_KERNEL_VARIANTS_H_
