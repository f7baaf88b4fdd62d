#include <cmath>
#include <vector>

#include "doctest.h"
#include "ftscert/kernels.hpp"
#include "ftscert/linalg.hpp"
#include "ftscert/util.hpp"

using namespace ftscert;
using namespace ftscert::linalg;

namespace {

std::vector<double> random_vec(Rng& rng, size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("reference ops match naive formulas") {
    Rng rng(1);
    const kernels::Ops& ops = kernels::ref::ops;
    for (size_t n : {1, 2, 3, 7, 16, 33}) {
        auto a = random_vec(rng, n), b = random_vec(rng, n);
        double dot = 0.0, nrm = 0.0;
        for (size_t i = 0; i < n; ++i) {
            dot += a[i] * b[i];
            nrm += a[i] * a[i];
        }
        CHECK(ops.dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(1e-14));
        CHECK(ops.nrm2sq(a.data(), n) == doctest::Approx(nrm).epsilon(1e-14));
    }
}

TEST_CASE("simd variant agrees with the reference on every op") {
    if (!kernels::avx2::supported()) return;  // nothing to compare on this host
    const kernels::Ops& ref = kernels::ref::ops;
    const kernels::Ops& fast = kernels::avx2::ops;
    Rng rng(2);
    for (size_t n = 1; n <= 67; ++n) {
        auto a = random_vec(rng, n), b = random_vec(rng, n);
        CHECK(ref.dot(a.data(), b.data(), n) ==
              doctest::Approx(fast.dot(a.data(), b.data(), n)).epsilon(1e-12));
        CHECK(ref.nrm2sq(a.data(), n) ==
              doctest::Approx(fast.nrm2sq(a.data(), n)).epsilon(1e-12));

        auto y1 = random_vec(rng, n);
        auto y2 = y1;
        ref.axpy(0.37, a.data(), y1.data(), n);
        fast.axpy(0.37, a.data(), y2.data(), n);
        for (size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));

        auto s1 = a, s2 = a;
        ref.scal(-1.75, s1.data(), n);
        fast.scal(-1.75, s2.data(), n);
        for (size_t i = 0; i < n; ++i) CHECK(s1[i] == doctest::Approx(s2[i]).epsilon(1e-12));
    }
}

TEST_CASE("gemm_acc accumulates C += A*B") {
    Rng rng(3);
    for (auto [m, k, n] : {std::tuple{1, 1, 1}, {2, 3, 4}, {5, 5, 5}, {7, 3, 9}}) {
        auto A = random_vec(rng, m * k);
        auto B = random_vec(rng, k * n);
        auto C0 = random_vec(rng, m * n);

        auto naive = C0;
        for (int i = 0; i < m; ++i)
            for (int l = 0; l < k; ++l)
                for (int j = 0; j < n; ++j) naive[i * n + j] += A[i * k + l] * B[l * n + j];

        for (const kernels::Ops* ops : {&kernels::ref::ops, &kernels::active()}) {
            auto C = C0;
            ops->gemm_acc(A.data(), k, B.data(), n, C.data(), n, m, k, n);
            for (int i = 0; i < m * n; ++i)
                CHECK(C[i] == doctest::Approx(naive[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("active dispatch returns a working implementation") {
    const kernels::Ops& ops = kernels::active();
    CHECK(!std::string(ops.name).empty());
    double a[3] = {1, 2, 3}, b[3] = {4, 5, 6};
    CHECK(ops.dot(a, b, 3) == doctest::Approx(32.0));
}

TEST_CASE("cholesky factors and solves SPD systems") {
    // A = L L^T with L = [[2,0,0],[1,3,0],[0,1,2]]
    std::vector<double> a = {4, 2, 0, 2, 10, 3, 0, 3, 5};
    std::vector<double> l = a;
    REQUIRE(cholesky(l, 3));
    CHECK(l[0] == doctest::Approx(2.0));
    CHECK(l[3] == doctest::Approx(1.0));
    CHECK(l[4] == doctest::Approx(3.0));
    CHECK(l[7] == doctest::Approx(1.0));
    CHECK(l[8] == doctest::Approx(2.0));

    std::vector<double> x = {1.0, 2.0, 3.0};
    std::vector<double> b(3, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b[i] += a[i * 3 + j] * x[j];
    chol_solve(l, 3, b);
    for (int i = 0; i < 3; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-12));

    std::vector<double> indef = {1, 2, 2, 1};  // eigenvalues 3 and -1
    CHECK(!cholesky(indef, 2));
}

TEST_CASE("jacobi eigensolver on a known symmetric matrix") {
    std::vector<double> a = {2, 1, 1, 2};
    std::vector<double> vals, vecs;
    jacobi_eigensym(a, 2, vals, vecs);
    REQUIRE(vals.size() == 2);
    CHECK(vals[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vals[1] == doctest::Approx(3.0).epsilon(1e-12));
    // columns orthonormal
    double c0 = vecs[0] * vecs[0] + vecs[2] * vecs[2];
    double c01 = vecs[0] * vecs[1] + vecs[2] * vecs[3];
    CHECK(c0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c01 == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(sym_min_eig(a, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lu factorization handles pivoting and flags singularity") {
    std::vector<double> a = {0, 2, 1, 1, 1, 1, 2, 0, 3};
    std::vector<int> perm;
    std::vector<double> lu = a;
    REQUIRE(lu_factor(lu, 3, perm));
    std::vector<double> x = {3.0, -1.0, 0.5};
    std::vector<double> b(3, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b[i] += a[i * 3 + j] * x[j];
    lu_solve(lu, 3, perm, b);
    for (int i = 0; i < 3; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-12));

    std::vector<double> sing = {1, 2, 2, 4};
    std::vector<double> slu = sing;
    CHECK(!lu_factor(slu, 2, perm));
}

TEST_CASE("rng is deterministic and uniform bounds hold") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng c(7);
    for (int i = 0; i < 1000; ++i) {
        double v = c.uniform(-2.0, 3.0);
        CHECK(v >= -2.0);
        CHECK(v < 3.0);
    }
}

TEST_CASE("fnv1a digest is stable") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("hello") == fnv1a64("hello"));
    CHECK(fnv1a64("hello") != fnv1a64("hellp"));
}

}  // TEST_SUITE
