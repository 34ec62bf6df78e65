#ifndef COSMOS_KERNELS_H_
#define COSMOS_KERNELS_H_

#include <cstddef>
#include <string_view>

// Dense double-precision inner loops. Every kernel has a portable scalar
// reference and, on x86-64, an AVX2+FMA variant picked once at startup.
// The COSMOS_ISA environment variable ("scalar" or "avx2") overrides the
// automatic choice.

namespace cosmos::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view IsaName(Isa isa);
bool IsaAvailable(Isa isa);

// Currently dispatched instruction set.
Isa ActiveIsa();

// Switches dispatch. Throws std::invalid_argument if the CPU lacks `isa`.
void SetIsa(Isa isa);

// sum_i a[i] * b[i]
double Dot(const double* a, const double* b, size_t n);

// y[i] += alpha * x[i]
void Axpy(double alpha, const double* x, double* y, size_t n);

// Row-major GEMM variants, all accumulating into c.
// GemmNN: c[m x n] += a[m x k] * b[k x n]
void GemmNN(const double* a, const double* b, double* c, size_t m, size_t k,
            size_t n);
// GemmNT: c[m x n] += a[m x k] * b[n x k]^T
void GemmNT(const double* a, const double* b, double* c, size_t m, size_t k,
            size_t n);
// GemmTN: c[m x n] += a[k x m]^T * b[k x n]
void GemmTN(const double* a, const double* b, double* c, size_t m, size_t k,
            size_t n);

// Per-ISA entry points, exposed for equivalence tests.
namespace scalar {
double Dot(const double* a, const double* b, size_t n);
void Axpy(double alpha, const double* x, double* y, size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define COSMOS_HAVE_AVX2_KERNELS 1
namespace avx2 {
double Dot(const double* a, const double* b, size_t n);
void Axpy(double alpha, const double* x, double* y, size_t n);
}  // namespace avx2
#endif

}  // namespace cosmos::kernels

#endif  // COSMOS_KERNELS_H_
