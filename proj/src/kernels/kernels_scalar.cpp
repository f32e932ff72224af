#include "kernels_impl.hpp"

namespace psiomega::kernels::detail {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay_scalar(const double* x, double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void mul_scalar(const double* d, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
}

}  // namespace

void spmv_scalar(const CsrView& a, const double* x, double* y) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) s += a.val[p] * x[a.col[p]];
    y[i] = s;
  }
}

void residual_scalar(const CsrView& a, const double* x, const double* b, double* r) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) s += a.val[p] * x[a.col[p]];
    r[i] = b[i] - s;
  }
}

const KernelTable kScalarTable{Isa::scalar, "scalar",    dot_scalar,  axpy_scalar,
                               xpay_scalar, mul_scalar, spmv_scalar, residual_scalar};

}  // namespace psiomega::kernels::detail
