#include "ftscert/kernels.hpp"

namespace ftscert::kernels::ref {

static double dot_(const double* x, const double* y, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

static void axpy_(double a, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

static void scal_(double a, double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) x[i] *= a;
}

static double nrm2sq_(const double* x, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

static void gemm_acc_(const double* A, size_t lda, const double* B, size_t ldb,
                      double* C, size_t ldc, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m; ++i) {
        const double* arow = A + i * lda;
        double* crow = C + i * ldc;
        for (size_t l = 0; l < k; ++l) {
            double a = arow[l];
            if (a == 0.0) continue;
            const double* brow = B + l * ldb;
            for (size_t j = 0; j < n; ++j) crow[j] += a * brow[j];
        }
    }
}

const Ops ops = {"scalar", dot_, axpy_, scal_, nrm2sq_, gemm_acc_};

}  // namespace ftscert::kernels::ref
