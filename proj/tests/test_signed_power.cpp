#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "ftscert/signed_power.hpp"
#include "ftscert/util.hpp"

using namespace ftscert;

TEST_SUITE("signed_power") {

TEST_CASE("signed power evaluation") {
    // -sign(z)|z|^(2/3)
    SignedPowerExpr e = SignedPowerExpr::make_term(1, Rational(-1), {1}, {Rational(2, 3)});
    CHECK(spe_eval(e, {-8.0}) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(spe_eval(e, {8.0}) == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(spe_eval(e, {0.0}) == 0.0);  // sign(0) = 0 kills the term
}

TEST_CASE("constants survive zero via 0^0 = 1") {
    SignedPowerExpr c = SignedPowerExpr::constant(2, Rational(5, 2));
    CHECK(spe_eval(c, {0.0, 0.0}) == doctest::Approx(2.5));
    SignedPowerExpr v = SignedPowerExpr::variable(2, 1);
    CHECK(spe_eval(v, {3.0, 0.0}) == 0.0);
    CHECK(spe_eval(v, {3.0, -2.5}) == doctest::Approx(-2.5));
    SignedPowerExpr a = SignedPowerExpr::abs_var(2, 0);
    CHECK(spe_eval(a, {-3.0, 1.0}) == doctest::Approx(3.0));
}

TEST_CASE("polynomials embed and extract") {
    Polynomial p(2);
    p.add_term({2, 1}, Rational(3));
    p.add_term({0, 3}, Rational(-1, 2));
    SignedPowerExpr e = SignedPowerExpr::from_poly(p);
    CHECK(e.is_polynomial());
    CHECK(e.to_polynomial() == p);
    for (auto z : {std::vector<double>{0.3, -1.2}, {-2.0, 0.5}, {0.0, 0.0}})
        CHECK(spe_eval(e, z) == doctest::Approx(p.eval(z)).epsilon(1e-14));
}

TEST_CASE("sign parity collapses under multiplication") {
    // sign(x)|x|^(1/2) * sign(x)|x|^(1/2) = |x|
    SignedPowerExpr h = SignedPowerExpr::make_term(1, Rational(1), {1}, {Rational(1, 2)});
    SignedPowerExpr prod = spe_mul(h, h);
    CHECK(prod == SignedPowerExpr::make_term(1, Rational(1), {0}, {Rational(1)}));
    CHECK(spe_eval(prod, {-4.0}) == doctest::Approx(4.0));
}

TEST_CASE("addition merges like terms") {
    SignedPowerExpr a = SignedPowerExpr::make_term(1, Rational(2), {1}, {Rational(1, 3)});
    SignedPowerExpr b = SignedPowerExpr::make_term(1, Rational(-2), {1}, {Rational(1, 3)});
    CHECK(spe_add(a, b).is_zero());
    SignedPowerExpr c = spe_add(a, SignedPowerExpr::constant(1, Rational(1)));
    CHECK(c.terms().size() == 2);
    CHECK(spe_sub(c, c).is_zero());
    CHECK(spe_scale(a, Rational(1, 2)) ==
          SignedPowerExpr::make_term(1, Rational(1), {1}, {Rational(1, 3)}));
    CHECK(spe_neg(a) == SignedPowerExpr::make_term(1, Rational(-2), {1}, {Rational(1, 3)}));
}

TEST_CASE("power substitution round-trips") {
    std::vector<int> q = {3, 2};
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        SignedPowerExpr e(2);
        int nterms = rng.uniform_int(1, 4);
        for (int t = 0; t < nterms; ++t) {
            e = spe_add(e, SignedPowerExpr::make_term(
                               2, Rational(rng.uniform_int(-5, 5), rng.uniform_int(1, 3)),
                               {uint8_t(rng.uniform_int(0, 1)), uint8_t(rng.uniform_int(0, 1))},
                               {Rational(rng.uniform_int(0, 6), rng.uniform_int(1, 3)),
                                Rational(rng.uniform_int(0, 6), rng.uniform_int(1, 3))}));
        }
        SignedPowerExpr fwd = spe_substitute_power(e, q, true);
        SignedPowerExpr back = spe_substitute_power(fwd, q, false);
        CHECK(back == spe_normalize(e));

        // numeric consistency: fwd(z) == e(sign(z)|z|^q)
        for (int pt = 0; pt < 5; ++pt) {
            std::vector<double> z = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            std::vector<double> zq(2);
            for (int i = 0; i < 2; ++i)
                zq[i] = (z[i] < 0 ? -1.0 : (z[i] > 0 ? 1.0 : 0.0)) *
                        std::pow(std::fabs(z[i]), double(q[i]));
            CHECK(spe_eval(fwd, z) ==
                  doctest::Approx(spe_eval(e, zq)).epsilon(1e-10));
        }
    }
}

TEST_CASE("negative exponents are fenced") {
    SignedPowerExpr e = SignedPowerExpr::make_term(1, Rational(1), {0}, {Rational(1, 2)});
    // inverse substitution with q=3 gives exponent 1/6, fine
    CHECK_NOTHROW(spe_substitute_power(e, {3}, false));
    SignedPowerExpr lo = SignedPowerExpr::make_term(1, Rational(1), {0}, {Rational(-1, 2)});
    CHECK(lo.has_negative_exponent());
    CHECK_THROWS_AS(spe_substitute_power(lo, {2}, true), std::domain_error);
    CHECK_NOTHROW(spe_substitute_power(lo, {2}, true, true));
}

TEST_CASE("sector resolution fixes signs") {
    // |x|^3 is not a polynomial; on x >= 0 it is x^3, on x <= 0 it is -x^3
    SignedPowerExpr e = SignedPowerExpr::make_term(1, Rational(1), {0}, {Rational(3)});
    CHECK(!spe_term_var_polynomial(e.terms()[0], 0));
    Polynomial plus = spe_resolve_sectors(e, {1});
    Polynomial minus = spe_resolve_sectors(e, {-1});
    CHECK(plus.coeff({3}) == Rational(1));
    CHECK(minus.coeff({3}) == Rational(-1));

    // x^3 = sign(x)|x|^3 is already a polynomial and resolves to itself
    SignedPowerExpr cube = SignedPowerExpr::make_term(1, Rational(1), {1}, {Rational(3)});
    CHECK(spe_term_var_polynomial(cube.terms()[0], 0));
    CHECK(spe_resolve_sectors(cube, {0}).coeff({3}) == Rational(1));
}

}  // TEST_SUITE
