#include <atomic>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace psiomega::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(PSIOMEGA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* select_default() {
  if (const char* env = std::getenv("PSIOMEGA_ISA"); env != nullptr && std::string(env) == "scalar") {
    return &detail::kScalarTable;
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{select_default()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() { return detail::kScalarTable; }

const KernelTable* avx2_table() {
#if defined(PSIOMEGA_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void set_active(Isa isa) {
  const KernelTable* t = isa == Isa::scalar ? &detail::kScalarTable : avx2_table();
  if (t == nullptr) throw std::invalid_argument("requested kernel variant is not available");
  current().store(t, std::memory_order_release);
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

void xpay(std::span<const double> x, double a, std::span<double> y) {
  assert(x.size() == y.size());
  active().xpay(x.data(), a, y.data(), x.size());
}

void mul(std::span<const double> d, std::span<const double> x, std::span<double> y) {
  assert(d.size() == x.size() && x.size() == y.size());
  active().mul(d.data(), x.data(), y.data(), x.size());
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  assert(y.size() == a.rows);
  active().spmv(a, x.data(), y.data());
}

void residual(const CsrView& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r) {
  assert(b.size() == a.rows && r.size() == a.rows);
  active().residual(a, x.data(), b.data(), r.data());
}

}  // namespace psiomega::kernels
