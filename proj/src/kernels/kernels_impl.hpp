#pragma once

#include "psiomega/kernels.hpp"

namespace psiomega::kernels::detail {

extern const KernelTable kScalarTable;

void spmv_scalar(const CsrView& a, const double* x, double* y);
void residual_scalar(const CsrView& a, const double* x, const double* b, double* r);

#if defined(PSIOMEGA_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace psiomega::kernels::detail
