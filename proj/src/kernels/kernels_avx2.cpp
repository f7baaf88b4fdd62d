#include "ftscert/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#define FTSCERT_HAVE_AVX2 1
#include <immintrin.h>
#endif

namespace ftscert::kernels::avx2 {

#if FTSCERT_HAVE_AVX2

static double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

static double dot_(const double* x, const double* y, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

static void axpy_(double a, const double* x, double* y, size_t n) {
    __m256d av = _mm256_set1_pd(a);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

static void scal_(double a, double* x, size_t n) {
    __m256d av = _mm256_set1_pd(a);
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

static double nrm2sq_(const double* x, size_t n) { return dot_(x, x, n); }

static void gemm_acc_(const double* A, size_t lda, const double* B, size_t ldb,
                      double* C, size_t ldc, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m; ++i) {
        const double* arow = A + i * lda;
        double* crow = C + i * ldc;
        for (size_t l = 0; l < k; ++l) {
            double a = arow[l];
            if (a == 0.0) continue;
            const double* brow = B + l * ldb;
            __m256d av = _mm256_set1_pd(a);
            size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cv = _mm256_loadu_pd(crow + j);
                cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cv);
                _mm256_storeu_pd(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += a * brow[j];
        }
    }
}

const Ops ops = {"avx2", dot_, axpy_, scal_, nrm2sq_, gemm_acc_};

bool compiled() { return true; }

bool supported() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#else

const Ops ops = {"avx2-unavailable", nullptr, nullptr, nullptr, nullptr, nullptr};
bool compiled() { return false; }
bool supported() { return false; }

#endif

}  // namespace ftscert::kernels::avx2
