#pragma once

#include <cstddef>

// Dense inner-loop kernels behind the SDP solver and the numeric checks.
// Scalar reference implementations are the semantic ground truth; the AVX2
// variants are runtime-selected and equivalence-tested against them.
// FTSCERT_KERNEL=scalar|avx2 overrides the dispatch (tests, triage).
namespace ftscert::kernels {

struct Ops {
    const char* name;
    double (*dot)(const double* x, const double* y, size_t n);
    void (*axpy)(double a, const double* x, double* y, size_t n);       // y += a*x
    void (*scal)(double a, double* x, size_t n);                        // x *= a
    double (*nrm2sq)(const double* x, size_t n);                        // sum x_i^2
    // C += A * B, row-major: A is m x k (lda), B is k x n (ldb), C is m x n (ldc)
    void (*gemm_acc)(const double* A, size_t lda, const double* B, size_t ldb,
                     double* C, size_t ldc, size_t m, size_t k, size_t n);
};

namespace ref {
extern const Ops ops;
}

namespace avx2 {
extern const Ops ops;     // null entries on non-x86 builds
bool compiled();          // built with AVX2 codegen at all
bool supported();         // CPU supports it right now
}

const Ops& active();

}  // namespace ftscert::kernels
