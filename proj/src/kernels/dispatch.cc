#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cosmos/kernels.h"

namespace cosmos::kernels {
namespace {

using DotFn = double (*)(const double*, const double*, size_t);
using AxpyFn = void (*)(double, const double*, double*, size_t);

struct Table {
  Isa isa;
  DotFn dot;
  AxpyFn axpy;
};

Table MakeTable(Isa isa) {
#ifdef COSMOS_HAVE_AVX2_KERNELS
  if (isa == Isa::kAvx2) return {Isa::kAvx2, &avx2::Dot, &avx2::Axpy};
#endif
  return {Isa::kScalar, &scalar::Dot, &scalar::Axpy};
}

Isa DetectIsa() {
  if (const char* forced = std::getenv("COSMOS_ISA")) {
    std::string name(forced);
    if (name == "scalar") return Isa::kScalar;
    if (name == "avx2" && IsaAvailable(Isa::kAvx2)) return Isa::kAvx2;
  }
  return IsaAvailable(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

Table& Active() {
  static Table table = MakeTable(DetectIsa());
  return table;
}

}  // namespace

std::string_view IsaName(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool IsaAvailable(Isa isa) {
  if (isa == Isa::kScalar) return true;
#ifdef COSMOS_HAVE_AVX2_KERNELS
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa ActiveIsa() { return Active().isa; }

void SetIsa(Isa isa) {
  if (!IsaAvailable(isa)) {
    throw std::invalid_argument("instruction set not available: " +
                                std::string(IsaName(isa)));
  }
  Active() = MakeTable(isa);
}

double Dot(const double* a, const double* b, size_t n) {
  return Active().dot(a, b, n);
}

void Axpy(double alpha, const double* x, double* y, size_t n) {
  Active().axpy(alpha, x, y, n);
}

void GemmNN(const double* a, const double* b, double* c, size_t m, size_t k,
            size_t n) {
  const AxpyFn axpy = Active().axpy;
  for (size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    for (size_t p = 0; p < k; ++p) {
      if (arow[p] != 0.0) axpy(arow[p], b + p * n, crow, n);
    }
  }
}

void GemmNT(const double* a, const double* b, double* c, size_t m, size_t k,
            size_t n) {
  const DotFn dot = Active().dot;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) c[i * n + j] += dot(a + i * k, b + j * k, k);
  }
}

void GemmTN(const double* a, const double* b, double* c, size_t m, size_t k,
            size_t n) {
  const AxpyFn axpy = Active().axpy;
  for (size_t p = 0; p < k; ++p) {
    const double* arow = a + p * m;
    const double* brow = b + p * n;
    for (size_t i = 0; i < m; ++i) {
      if (arow[i] != 0.0) axpy(arow[i], brow, c + i * n, n);
    }
  }
}

}  // namespace cosmos::kernels
