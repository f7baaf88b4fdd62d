#include "ftscert/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace ftscert {

Rational rat_from_string(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational num = rat_from_string(s.substr(0, slash));
        Rational den = rat_from_string(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in rational literal");
        return num / den;
    }

    bool neg = false;
    size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;   // integer and fraction digits concatenated
    long frac_len = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
        if (s[i] == '.') {
            if (seen_dot) throw std::invalid_argument("malformed number: " + text);
            seen_dot = true;
        } else {
            digits.push_back(s[i]);
            if (seen_dot) ++frac_len;
            seen_digit = true;
        }
    }
    if (!seen_digit) throw std::invalid_argument("malformed number: " + text);

    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            eneg = s[i] == '-';
            ++i;
        }
        if (i == s.size()) throw std::invalid_argument("malformed exponent: " + text);
        long v = 0;
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i])))
                throw std::invalid_argument("malformed exponent: " + text);
            v = v * 10 + (s[i] - '0');
            if (v > 100000) throw std::invalid_argument("exponent out of range: " + text);
        }
        exp10 = eneg ? -v : v;
    }
    if (i != s.size()) throw std::invalid_argument("malformed number: " + text);

    mpz_class mantissa(digits.empty() ? "0" : digits, 10);
    Rational r(mantissa);
    long net = exp10 - frac_len;
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(net < 0 ? -net : net));
    if (net >= 0)
        r *= Rational(p10);
    else
        r /= Rational(p10);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

std::string rat_to_string(const Rational& r) {
    Rational c = r;
    c.canonicalize();  // mpq_class does not reduce values built as (num, den)
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string rat_to_decimal(const Rational& rr) {
    Rational r = rr;
    r.canonicalize();
    mpz_class den = r.get_den();
    long twos = 0, fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1) return rat_to_string(r);
    long digits = twos > fives ? twos : fives;
    if (digits == 0) return r.get_num().get_str();
    // scaled = num * 10^digits / den_original is integral by construction
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class scaled = r.get_num() * p10 / r.get_den();
    bool neg = scaled < 0;
    std::string body = mpz_class(abs(scaled)).get_str();
    if (static_cast<long>(body.size()) <= digits) body.insert(0, digits - body.size() + 1, '0');
    body.insert(body.size() - digits, ".");
    return (neg ? "-" : "") + body;
}

double rat_to_double(const Rational& r) { return r.get_d(); }

Rational rat_from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite double");
    Rational r;
    mpq_set_d(r.get_mpq_t(), v);
    return r;
}

Rational rat_pow_int(const Rational& r, long e) {
    if (e == 0) return Rational(1);
    bool inv = e < 0;
    unsigned long k = static_cast<unsigned long>(inv ? -e : e);
    if (inv && r == 0) throw std::domain_error("negative power of zero");
    Rational base = r, acc(1);
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    if (inv) acc = 1 / acc;
    return acc;
}

bool rat_is_integer(const Rational& r) {
    Rational c = r;
    c.canonicalize();
    return c.get_den() == 1;
}

long rat_to_long(const Rational& rr) {
    Rational r = rr;
    r.canonicalize();
    if (r.get_den() != 1) throw std::domain_error("not an integer: " + rat_to_string(r));
    if (!r.get_num().fits_slong_p()) throw std::domain_error("integer out of range: " + rat_to_string(r));
    return r.get_num().get_si();
}

long rat_den_long(const Rational& rr) {
    Rational r = rr;
    r.canonicalize();
    if (!r.get_den().fits_slong_p()) throw std::domain_error("denominator out of range");
    return r.get_den().get_si();
}

long gcd_long(long a, long b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) {
        long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

long lcm_long(long a, long b) {
    if (a == 0 || b == 0) return 0;
    return a / gcd_long(a, b) * b;
}

}  // namespace ftscert
