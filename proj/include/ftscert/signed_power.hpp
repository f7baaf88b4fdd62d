#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftscert/polynomial.hpp"
#include "ftscert/rational.hpp"

namespace ftscert {

// One term c * prod_i sign(x_i)^sigma_i * |x_i|^exps_i with sigma_i in {0,1}
// and rational exponents. sign(x)^2 collapses to 1, so sigma is a parity bit.
struct SignedPowerTerm {
    Rational coeff;
    std::vector<uint8_t> sigma;
    std::vector<Rational> exps;
};

// Finite sum of signed power terms, kept in a canonical merged/sorted form.
// Exponents are normally nonnegative; negative exponents may appear in
// intermediate expressions and are checked at substitution boundaries.
class SignedPowerExpr {
public:
    SignedPowerExpr() = default;
    explicit SignedPowerExpr(int nvars) : nvars_(nvars) {}

    static SignedPowerExpr constant(int nvars, const Rational& c);
    static SignedPowerExpr variable(int nvars, int i);
    static SignedPowerExpr abs_var(int nvars, int i);
    static SignedPowerExpr make_term(int nvars, const Rational& c,
                                     std::vector<uint8_t> sigma,
                                     std::vector<Rational> exps);
    static SignedPowerExpr from_poly(const Polynomial& p);

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<SignedPowerTerm>& terms() const { return terms_; }

    bool has_negative_exponent() const;
    bool is_polynomial() const;
    Polynomial to_polynomial() const;

    double eval(const std::vector<double>& z) const;

    std::string str(const std::vector<std::string>& names) const;

    bool operator==(const SignedPowerExpr& o) const {
        return nvars_ == o.nvars_ && terms_ == o.terms_;
    }

    friend SignedPowerExpr spe_add(const SignedPowerExpr& a, const SignedPowerExpr& b);
    friend SignedPowerExpr spe_mul(const SignedPowerExpr& a, const SignedPowerExpr& b);
    friend SignedPowerExpr spe_normalize(const SignedPowerExpr& a);
    friend SignedPowerExpr spe_neg(const SignedPowerExpr& a);
    friend SignedPowerExpr spe_scale(const SignedPowerExpr& a, const Rational& c);

private:
    void insert_term(SignedPowerTerm t);
    void canonicalize();

    int nvars_ = 0;
    std::vector<SignedPowerTerm> terms_;
};

bool operator==(const SignedPowerTerm& a, const SignedPowerTerm& b);

SignedPowerExpr spe_add(const SignedPowerExpr& a, const SignedPowerExpr& b);
SignedPowerExpr spe_sub(const SignedPowerExpr& a, const SignedPowerExpr& b);
SignedPowerExpr spe_mul(const SignedPowerExpr& a, const SignedPowerExpr& b);
SignedPowerExpr spe_neg(const SignedPowerExpr& a);
SignedPowerExpr spe_scale(const SignedPowerExpr& a, const Rational& c);

// Canonical form (terms merged and sorted). Expressions built through the
// public API are already canonical; exposed for completeness.
SignedPowerExpr spe_normalize(const SignedPowerExpr& a);

// Evaluate at z with conventions sign(0) = 0 and 0^0 = 1.
double spe_eval(const SignedPowerExpr& e, const std::vector<double>& z);

// Substitute x_i <- sign(x_i)*|x_i|^(q_i) (forward) or its inverse
// x_i <- sign(x_i)*|x_i|^(1/q_i). Sign bits are unchanged; exponents are
// multiplied (forward) or divided (inverse) by q_i. Unless allow_negative
// is set, a negative exponent in the result raises std::domain_error.
SignedPowerExpr spe_substitute_power(const SignedPowerExpr& e,
                                     const std::vector<int>& q,
                                     bool forward,
                                     bool allow_negative = false);

// True when the term, restricted to variable i, is an honest polynomial
// factor: integer exponent >= 0 whose parity matches the sign bit.
bool spe_term_var_polynomial(const SignedPowerTerm& t, int i);

// Fix the signs of a subset of variables: for each i with signs[i] != 0 the
// term factor sign(x_i)^sigma*|x_i|^e is rewritten as s^(sigma+e) * x_i^e,
// which must leave an integer exponent. Used to resolve sector constraints.
Polynomial spe_resolve_sectors(const SignedPowerExpr& e, const std::vector<int>& signs);

}  // namespace ftscert
