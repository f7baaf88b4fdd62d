#include <stdexcept>

#include "doctest.h"
#include "ftscert/rational.hpp"

using namespace ftscert;

TEST_SUITE("rational") {

TEST_CASE("parses integers, fractions and decimals") {
    CHECK(rat_from_string("-3") == Rational(-3));
    CHECK(rat_from_string("71/10") == Rational(71, 10));
    CHECK(rat_from_string("5.42") == Rational(271, 50));
    CHECK(rat_from_string("0.0001") == Rational(1, 10000));
    CHECK(rat_from_string("-0.5") == Rational(-1, 2));
}

TEST_CASE("parses scientific notation exactly") {
    Rational r = rat_from_string("5.1188e-7");
    CHECK(r == Rational(51188) / rat_pow_int(Rational(10), 11));
    CHECK(rat_to_double(r) == doctest::Approx(5.1188e-7).epsilon(1e-15));
    CHECK(rat_from_string("1.5e3") == Rational(1500));
    CHECK(rat_from_string("2E2") == Rational(200));
}

TEST_CASE("rejects malformed input") {
    CHECK_THROWS_AS(rat_from_string("abc"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string(""), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("1.2.3"), std::invalid_argument);
}

TEST_CASE("string forms round-trip") {
    CHECK(rat_to_string(Rational(3)) == "3");
    CHECK(rat_to_string(Rational(-7, 2)) == "-7/2");
    CHECK(rat_from_string(rat_to_string(Rational(22, 7))) == Rational(22, 7));
}

TEST_CASE("decimal form is exact where the base allows it") {
    CHECK(rat_to_decimal(Rational(71, 10)) == "7.1");
    CHECK(rat_to_decimal(Rational(1, 10000)) == "0.0001");
    CHECK(rat_to_decimal(Rational(3, 4)) == "0.75");
    CHECK(rat_to_decimal(Rational(5)) == "5");
    // denominator with a factor other than 2 and 5 falls back to a fraction
    CHECK(rat_to_decimal(Rational(2, 3)) == "2/3");
    for (long num : {1L, -7L, 22L, 41L}) {
        for (long den : {1L, 3L, 8L, 10L, 48L}) {
            Rational r(num, den);
            r.canonicalize();
            CHECK(rat_from_string(rat_to_decimal(r)) == r);
        }
    }
}

TEST_CASE("doubles convert exactly both ways") {
    CHECK(rat_from_double(0.5) == Rational(1, 2));
    CHECK(rat_from_double(-3.0) == Rational(-3));
    for (double v : {0.1, 1.0 / 3.0, 5.42, 9.466666666}) {
        Rational r = rat_from_double(v);
        CHECK(rat_to_double(r) == v);  // dyadic rationals are lossless
    }
}

TEST_CASE("integer helpers") {
    CHECK(rat_pow_int(Rational(2), 10) == Rational(1024));
    CHECK(rat_pow_int(Rational(2, 3), -2) == Rational(9, 4));
    CHECK(rat_is_integer(Rational(8, 2)));
    CHECK(!rat_is_integer(Rational(1, 3)));
    CHECK(rat_to_long(Rational(42)) == 42);
    CHECK(rat_den_long(Rational(5, 12)) == 12);
    CHECK(gcd_long(12, 18) == 6);
    CHECK(gcd_long(0, 7) == 7);
    CHECK(lcm_long(4, 6) == 12);
}

}  // TEST_SUITE
