#pragma once

// Data-parallel inner loops of the Krylov and multigrid solvers.
//
// Every kernel exists as a scalar reference implementation and, on x86-64,
// as an AVX2/FMA variant. The variant is chosen once at startup from the
// CPU feature bits; PSIOMEGA_ISA=scalar in the environment forces the
// reference path. Results of the two paths agree to rounding (the vector
// variants reassociate reductions).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace psiomega {

using Index = std::int32_t;

namespace kernels {

enum class Isa { scalar, avx2 };

/// Compressed sparse row view. row_ptr has rows+1 entries.
struct CsrView {
  std::size_t rows = 0;
  const Index* row_ptr = nullptr;
  const Index* col = nullptr;
  const double* val = nullptr;
};

struct KernelTable {
  Isa isa;
  std::string_view name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a*x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = x + a*y
  void (*xpay)(const double* x, double a, double* y, std::size_t n);
  // y = d .* x
  void (*mul)(const double* d, const double* x, double* y, std::size_t n);
  // y = A x
  void (*spmv)(const CsrView& a, const double* x, double* y);
  // r = b - A x
  void (*residual)(const CsrView& a, const double* x, const double* b, double* r);
};

const KernelTable& scalar_table();

/// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

const KernelTable& active();

/// Switches the process-wide table. Throws std::invalid_argument if the
/// requested variant is unavailable on this machine.
void set_active(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void xpay(std::span<const double> x, double a, std::span<double> y);
void mul(std::span<const double> d, std::span<const double> x, std::span<double> y);
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
void residual(const CsrView& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r);

}  // namespace kernels
}  // namespace psiomega
