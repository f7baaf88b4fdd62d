#include <cmath>
#include <vector>

#include "doctest.h"
#include "ftscert/parse.hpp"
#include "ftscert/polynomial.hpp"
#include "ftscert/util.hpp"

using namespace ftscert;

namespace {

Polynomial random_poly(Rng& rng, int nvars, int maxdeg) {
    Polynomial p(nvars);
    int nterms = rng.uniform_int(1, 8);
    for (int t = 0; t < nterms; ++t) {
        ExpVec e(nvars, 0);
        int deg = rng.uniform_int(0, maxdeg);
        for (int d = 0; d < deg; ++d) ++e[rng.uniform_int(0, nvars - 1)];
        p.add_term(e, Rational(rng.uniform_int(-9, 9), rng.uniform_int(1, 5)));
    }
    return p;
}

}  // namespace

TEST_SUITE("polynomial") {

TEST_CASE("terms merge and cancel exactly") {
    Polynomial p(2);
    p.add_term({1, 0}, Rational(1, 3));
    p.add_term({1, 0}, Rational(2, 3));
    CHECK(p.coeff({1, 0}) == Rational(1));
    p.add_term({1, 0}, Rational(-1));
    CHECK(p.is_zero());
    CHECK(p.degree() == -1);
    CHECK(p.min_degree() == -1);
}

TEST_CASE("degree bookkeeping") {
    Polynomial p(2);
    p.add_term({0, 2}, Rational(1));
    p.add_term({1, 0}, Rational(-4));
    CHECK(p.degree() == 2);
    CHECK(p.min_degree() == 1);
    CHECK(expvec_degree({3, 4}) == 7);
}

TEST_CASE("arithmetic identities hold exactly") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        int n = rng.uniform_int(1, 3);
        Polynomial a = random_poly(rng, n, 4);
        Polynomial b = random_poly(rng, n, 4);
        Polynomial c = random_poly(rng, n, 3);
        CHECK((a + b) * c == a * c + b * c);
        CHECK(a - a == Polynomial(n));
        CHECK(-a == a.scaled(Rational(-1)));
        CHECK(a.pow(3) == a * a * a);
    }
}

TEST_CASE("partial derivatives") {
    // d/dx (x^2 y + 3 y) = 2 x y
    Polynomial p(2);
    p.add_term({2, 1}, Rational(1));
    p.add_term({0, 1}, Rational(3));
    Polynomial px = p.partial(0);
    CHECK(px.coeff({1, 1}) == Rational(2));
    CHECK(px.terms().size() == 1);
    Polynomial py = p.partial(1);
    CHECK(py.coeff({2, 0}) == Rational(1));
    CHECK(py.coeff({0, 0}) == Rational(3));
    auto grad = p.gradient();
    REQUIRE(grad.size() == 2);
    CHECK(grad[0] == px);
    CHECK(grad[1] == py);
}

TEST_CASE("evaluation in doubles and rationals") {
    Polynomial p(1);
    p.add_term({4}, rat_from_string("5.42"));
    CHECK(p.eval({1.2}) == doctest::Approx(11.238912).epsilon(1e-12));
    CHECK(p.eval_rat({Rational(6, 5)}) == Rational(271, 50) * rat_pow_int(Rational(6, 5), 4));

    Polynomial q = poly_norm_sq(3);
    CHECK(q.eval({1.0, 2.0, -2.0}) == doctest::Approx(9.0));
}

TEST_CASE("gradient matches central finite differences") {
    // random degree <= 6 polynomials, 50 points, h = 1e-6, relative 1e-5
    Rng rng(12);
    int checked = 0;
    while (checked < 50) {
        int n = rng.uniform_int(1, 3);
        Polynomial p = random_poly(rng, n, 6);
        auto grad = p.gradient();
        std::vector<double> x(n);
        for (auto& xi : x) xi = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < n; ++i) {
            const double h = 1e-6;
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            double fd = (p.eval(xp) - p.eval(xm)) / (2 * h);
            double exact = grad[i].eval(x);
            CHECK(std::fabs(fd - exact) <= 1e-5 * (1.0 + std::fabs(exact)));
        }
        ++checked;
    }
}

TEST_CASE("printing round-trips through the parser") {
    std::vector<std::string> names = {"x", "y"};
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        Polynomial p = random_poly(rng, 2, 5);
        Polynomial back = parse_polynomial(p.str(names), names);
        CHECK(back == p);
    }
    Polynomial z(2);
    CHECK(parse_polynomial(z.str(names), names) == z);
}

}  // TEST_SUITE
