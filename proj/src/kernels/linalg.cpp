#include "ftscert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ftscert/kernels.hpp"

namespace ftscert::linalg {

bool cholesky(std::vector<double>& a, size_t n, double tol) {
    const auto& k = kernels::active();
    for (size_t j = 0; j < n; ++j) {
        double d = a[j * n + j] - k.nrm2sq(&a[j * n], j);
        if (!(d > tol)) return false;
        d = std::sqrt(d);
        a[j * n + j] = d;
        double inv = 1.0 / d;
        for (size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j] - k.dot(&a[i * n], &a[j * n], j);
            a[i * n + j] = s * inv;
        }
        for (size_t jj = j + 1; jj < n; ++jj) a[j * n + jj] = 0.0;
    }
    return true;
}

void chol_solve(const std::vector<double>& l, size_t n, std::vector<double>& b) {
    const auto& k = kernels::active();
    for (size_t i = 0; i < n; ++i)
        b[i] = (b[i] - k.dot(&l[i * n], b.data(), i)) / l[i * n + i];
    for (size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (size_t j = ii + 1; j < n; ++j) s -= l[j * n + ii] * b[j];
        b[ii] = s / l[ii * n + ii];
    }
}

void jacobi_eigensym(const std::vector<double>& a_in, size_t n,
                     std::vector<double>& eigvals, std::vector<double>& eigvecs) {
    std::vector<double> a = a_in;
    eigvecs.assign(n * n, 0.0);
    for (size_t i = 0; i < n; ++i) eigvecs[i * n + i] = 1.0;
    if (n == 0) { eigvals.clear(); return; }

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off <= 1e-30 * (1.0 + std::abs(a[0]))) break;

        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (apq == 0.0) continue;
                double app = a[p * n + p], aqq = a[q * n + q];
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (size_t i = 0; i < n; ++i) {
                    double aip = a[i * n + p], aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for (size_t i = 0; i < n; ++i) {
                    double api = a[p * n + i], aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for (size_t i = 0; i < n; ++i) {
                    double vip = eigvecs[p * n + i], viq = eigvecs[q * n + i];
                    eigvecs[p * n + i] = c * vip - s * viq;
                    eigvecs[q * n + i] = s * vip + c * viq;
                }
            }
        }
    }

    eigvals.resize(n);
    for (size_t i = 0; i < n; ++i) eigvals[i] = a[i * n + i];

    // Sort ascending, carrying eigenvector rows along. Stable order keeps
    // runs deterministic when eigenvalues tie.
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t x, size_t y) { return eigvals[x] < eigvals[y]; });
    std::vector<double> vals(n), vecs(n * n);
    for (size_t r = 0; r < n; ++r) {
        vals[r] = eigvals[idx[r]];
        std::copy(&eigvecs[idx[r] * n], &eigvecs[idx[r] * n] + n, &vecs[r * n]);
    }
    eigvals = std::move(vals);
    eigvecs = std::move(vecs);
}

double sym_min_eig(const std::vector<double>& a, size_t n) {
    if (n == 0) return 0.0;
    std::vector<double> vals, vecs;
    jacobi_eigensym(a, n, vals, vecs);
    return vals[0];
}

bool lu_factor(std::vector<double>& a, size_t n, std::vector<int>& perm) {
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t j = 0; j < n; ++j) {
        size_t piv = j;
        double best = std::abs(a[j * n + j]);
        for (size_t i = j + 1; i < n; ++i) {
            double v = std::abs(a[i * n + j]);
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) return false;
        if (piv != j) {
            for (size_t c = 0; c < n; ++c) std::swap(a[j * n + c], a[piv * n + c]);
            std::swap(perm[j], perm[piv]);
        }
        double inv = 1.0 / a[j * n + j];
        for (size_t i = j + 1; i < n; ++i) {
            double m = a[i * n + j] * inv;
            a[i * n + j] = m;
            if (m != 0.0)
                kernels::active().axpy(-m, &a[j * n + j + 1], &a[i * n + j + 1], n - j - 1);
        }
    }
    return true;
}

void lu_solve(const std::vector<double>& lu, size_t n, const std::vector<int>& perm,
              std::vector<double>& b) {
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (size_t i = 1; i < n; ++i)
        x[i] -= kernels::active().dot(&lu[i * n], x.data(), i);
    for (size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (size_t j = ii + 1; j < n; ++j) s -= lu[ii * n + j] * x[j];
        x[ii] = s / lu[ii * n + ii];
    }
    b = std::move(x);
}

}  // namespace ftscert::linalg
