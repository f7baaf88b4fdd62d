#pragma once

#include <map>
#include <string>
#include <vector>

#include "ftscert/rational.hpp"

namespace ftscert {

// Exponent vector, one entry per variable.
using ExpVec = std::vector<int>;

int expvec_degree(const ExpVec& e);

// Sparse multivariate polynomial with exact rational coefficients.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, const Rational& c);
    static Polynomial variable(int nvars, int i);
    static Polynomial monomial(int nvars, const ExpVec& e, const Rational& c);

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;      // total degree; -1 for the zero polynomial
    int min_degree() const;  // smallest term degree; -1 for zero

    const std::map<ExpVec, Rational>& terms() const { return terms_; }
    Rational coeff(const ExpVec& e) const;

    void add_term(const ExpVec& e, const Rational& c);

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scaled(const Rational& c) const;
    Polynomial pow(int k) const;

    Polynomial partial(int i) const;
    std::vector<Polynomial> gradient() const;

    double eval(const std::vector<double>& x) const;
    Rational eval_rat(const std::vector<Rational>& x) const;

    std::string str(const std::vector<std::string>& names) const;

    bool operator==(const Polynomial& o) const {
        return nvars_ == o.nvars_ && terms_ == o.terms_;
    }

private:
    int nvars_ = 0;
    std::map<ExpVec, Rational> terms_;
};

// sum of x_i^2
Polynomial poly_norm_sq(int nvars);

}  // namespace ftscert
