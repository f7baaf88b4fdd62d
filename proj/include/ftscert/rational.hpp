#pragma once

#include <gmpxx.h>

#include <string>

namespace ftscert {

// Exact rational scalar. All symbolic stages stay in Rational; doubles appear
// only at SDP assembly, evaluation, and reporting.
using Rational = mpq_class;

// Accepts "-3", "5.42", "5.1188e-7", "71/10". Throws std::invalid_argument.
Rational rat_from_string(const std::string& text);

// Canonical exact form: "3", "-7/2".
std::string rat_to_string(const Rational& r);

// Exact decimal when the denominator is 2^a * 5^b ("5.42"), otherwise the
// fraction form. Both shapes reparse exactly via rat_from_string.
std::string rat_to_decimal(const Rational& r);

double rat_to_double(const Rational& r);

// Exact dyadic rational of the double (no rounding).
Rational rat_from_double(double v);

// r^e for integer e (e < 0 requires r != 0).
Rational rat_pow_int(const Rational& r, long e);

bool rat_is_integer(const Rational& r);

// Requires rat_is_integer and that the value fits a long.
long rat_to_long(const Rational& r);

// Denominator as long (lowest terms, so this is the root index of the power).
long rat_den_long(const Rational& r);

long gcd_long(long a, long b);
long lcm_long(long a, long b);

}  // namespace ftscert
