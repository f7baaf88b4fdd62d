#include "ftscert/signed_power.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ftscert {

bool operator==(const SignedPowerTerm& a, const SignedPowerTerm& b) {
    return a.coeff == b.coeff && a.sigma == b.sigma && a.exps == b.exps;
}

namespace {

// Total order on (exps, sigma); coefficient is not part of the key.
int term_key_cmp(const SignedPowerTerm& a, const SignedPowerTerm& b) {
    for (size_t i = 0; i < a.exps.size(); ++i) {
        int c = cmp(a.exps[i], b.exps[i]);
        if (c != 0) return c;
    }
    for (size_t i = 0; i < a.sigma.size(); ++i) {
        if (a.sigma[i] != b.sigma[i]) return a.sigma[i] < b.sigma[i] ? -1 : 1;
    }
    return 0;
}

}  // namespace

SignedPowerExpr SignedPowerExpr::constant(int nvars, const Rational& c) {
    SignedPowerExpr e(nvars);
    if (c != 0) {
        SignedPowerTerm t{c, std::vector<uint8_t>(nvars, 0),
                          std::vector<Rational>(nvars, Rational(0))};
        e.terms_.push_back(std::move(t));
    }
    return e;
}

SignedPowerExpr SignedPowerExpr::variable(int nvars, int i) {
    SignedPowerExpr e(nvars);
    SignedPowerTerm t{Rational(1), std::vector<uint8_t>(nvars, 0),
                      std::vector<Rational>(nvars, Rational(0))};
    t.sigma[i] = 1;
    t.exps[i] = Rational(1);
    e.terms_.push_back(std::move(t));
    return e;
}

SignedPowerExpr SignedPowerExpr::abs_var(int nvars, int i) {
    SignedPowerExpr e(nvars);
    SignedPowerTerm t{Rational(1), std::vector<uint8_t>(nvars, 0),
                      std::vector<Rational>(nvars, Rational(0))};
    t.exps[i] = Rational(1);
    e.terms_.push_back(std::move(t));
    return e;
}

SignedPowerExpr SignedPowerExpr::make_term(int nvars, const Rational& c,
                                           std::vector<uint8_t> sigma,
                                           std::vector<Rational> exps) {
    if (static_cast<int>(sigma.size()) != nvars || static_cast<int>(exps.size()) != nvars)
        throw std::invalid_argument("make_term: size mismatch");
    SignedPowerExpr e(nvars);
    // mpq_class leaves caller-built fractions like 2/2 unreduced; every stored
    // rational must be canonical for comparisons to work
    Rational cc = c;
    cc.canonicalize();
    for (auto& x : exps) x.canonicalize();
    if (cc != 0) e.terms_.push_back(SignedPowerTerm{cc, std::move(sigma), std::move(exps)});
    return e;
}

SignedPowerExpr SignedPowerExpr::from_poly(const Polynomial& p) {
    SignedPowerExpr e(p.nvars());
    for (const auto& [ev, c] : p.terms()) {
        SignedPowerTerm t{c, std::vector<uint8_t>(p.nvars(), 0),
                          std::vector<Rational>(p.nvars(), Rational(0))};
        for (int i = 0; i < p.nvars(); ++i) {
            t.sigma[i] = static_cast<uint8_t>(ev[i] & 1);
            t.exps[i] = Rational(ev[i]);
        }
        e.terms_.push_back(std::move(t));
    }
    e.canonicalize();
    return e;
}

void SignedPowerExpr::canonicalize() {
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const SignedPowerTerm& a, const SignedPowerTerm& b) {
                         return term_key_cmp(a, b) < 0;
                     });
    std::vector<SignedPowerTerm> merged;
    for (auto& t : terms_) {
        if (!merged.empty() && term_key_cmp(merged.back(), t) == 0) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(std::move(t));
        }
    }
    terms_.clear();
    for (auto& t : merged)
        if (t.coeff != 0) terms_.push_back(std::move(t));
}

void SignedPowerExpr::insert_term(SignedPowerTerm t) {
    terms_.push_back(std::move(t));
}

bool SignedPowerExpr::has_negative_exponent() const {
    for (const auto& t : terms_)
        for (const auto& e : t.exps)
            if (e < 0) return true;
    return false;
}

bool spe_term_var_polynomial(const SignedPowerTerm& t, int i) {
    const Rational& e = t.exps[i];
    if (!rat_is_integer(e) || e < 0) return false;
    long n = rat_to_long(e);
    return (n % 2) == t.sigma[i];
}

bool SignedPowerExpr::is_polynomial() const {
    for (const auto& t : terms_)
        for (int i = 0; i < nvars_; ++i)
            if (!spe_term_var_polynomial(t, i)) return false;
    return true;
}

Polynomial SignedPowerExpr::to_polynomial() const {
    Polynomial p(nvars_);
    for (const auto& t : terms_) {
        ExpVec ev(nvars_);
        for (int i = 0; i < nvars_; ++i) {
            if (!spe_term_var_polynomial(t, i))
                throw std::domain_error("to_polynomial: term is not polynomial in variable " +
                                        std::to_string(i + 1));
            ev[i] = static_cast<int>(rat_to_long(t.exps[i]));
        }
        p.add_term(ev, t.coeff);
    }
    return p;
}

double SignedPowerExpr::eval(const std::vector<double>& z) const {
    if (static_cast<int>(z.size()) != nvars_)
        throw std::invalid_argument("spe eval: point size mismatch");
    double s = 0.0;
    for (const auto& t : terms_) {
        double v = rat_to_double(t.coeff);
        for (int i = 0; i < nvars_; ++i) {
            double zi = z[i];
            if (t.sigma[i]) {
                if (zi == 0.0) {
                    v = 0.0;
                    break;
                }
                if (zi < 0.0) v = -v;
            }
            if (t.exps[i] != 0) {
                double e = rat_to_double(t.exps[i]);
                v *= std::pow(std::fabs(zi), e);
            }
        }
        s += v;
    }
    return s;
}

double spe_eval(const SignedPowerExpr& e, const std::vector<double>& z) {
    return e.eval(z);
}

SignedPowerExpr spe_normalize(const SignedPowerExpr& a) {
    SignedPowerExpr r = a;
    r.canonicalize();
    return r;
}

SignedPowerExpr spe_add(const SignedPowerExpr& a, const SignedPowerExpr& b) {
    if (a.nvars_ != b.nvars_) throw std::invalid_argument("spe add: nvars mismatch");
    SignedPowerExpr r(a.nvars_);
    r.terms_ = a.terms_;
    r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
    r.canonicalize();
    return r;
}

SignedPowerExpr spe_sub(const SignedPowerExpr& a, const SignedPowerExpr& b) {
    return spe_add(a, spe_neg(b));
}

SignedPowerExpr spe_neg(const SignedPowerExpr& a) {
    SignedPowerExpr r = a;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

SignedPowerExpr spe_scale(const SignedPowerExpr& a, const Rational& c) {
    if (c == 0) return SignedPowerExpr(a.nvars_);
    SignedPowerExpr r = a;
    for (auto& t : r.terms_) t.coeff *= c;
    return r;
}

SignedPowerExpr spe_mul(const SignedPowerExpr& a, const SignedPowerExpr& b) {
    if (a.nvars_ != b.nvars_) throw std::invalid_argument("spe mul: nvars mismatch");
    SignedPowerExpr r(a.nvars_);
    for (const auto& ta : a.terms_) {
        for (const auto& tb : b.terms_) {
            SignedPowerTerm t{ta.coeff * tb.coeff, ta.sigma, ta.exps};
            for (int i = 0; i < a.nvars_; ++i) {
                t.sigma[i] = static_cast<uint8_t>(t.sigma[i] ^ tb.sigma[i]);
                t.exps[i] += tb.exps[i];
            }
            r.terms_.push_back(std::move(t));
        }
    }
    r.canonicalize();
    return r;
}

SignedPowerExpr spe_substitute_power(const SignedPowerExpr& e,
                                     const std::vector<int>& q,
                                     bool forward,
                                     bool allow_negative) {
    if (static_cast<int>(q.size()) != e.nvars())
        throw std::invalid_argument("substitute_power: q size mismatch");
    for (int qi : q)
        if (qi < 1) throw std::invalid_argument("substitute_power: q entries must be >= 1");
    SignedPowerExpr r(e.nvars());
    for (const auto& t : e.terms()) {
        SignedPowerTerm nt = t;
        for (int i = 0; i < e.nvars(); ++i) {
            if (forward)
                nt.exps[i] *= Rational(q[i]);
            else
                nt.exps[i] /= Rational(q[i]);
            if (!allow_negative && nt.exps[i] < 0)
                throw std::domain_error("substitute_power: negative exponent in result");
        }
        r = spe_add(r, SignedPowerExpr::make_term(e.nvars(), nt.coeff, nt.sigma, nt.exps));
    }
    return r;
}

Polynomial spe_resolve_sectors(const SignedPowerExpr& e, const std::vector<int>& signs) {
    if (static_cast<int>(signs.size()) != e.nvars())
        throw std::invalid_argument("resolve_sectors: signs size mismatch");
    Polynomial p(e.nvars());
    for (const auto& t : e.terms()) {
        ExpVec ev(e.nvars());
        bool negate = false;
        for (int i = 0; i < e.nvars(); ++i) {
            const Rational& ex = t.exps[i];
            if (!rat_is_integer(ex) || ex < 0)
                throw std::domain_error("resolve_sectors: non-integer exponent survives");
            long n = rat_to_long(ex);
            if (signs[i] == 0) {
                if ((n % 2) != t.sigma[i])
                    throw std::domain_error(
                        "resolve_sectors: sign parity mismatch on unsectored variable " +
                        std::to_string(i + 1));
            } else if (signs[i] < 0) {
                // sign(x_i)^sigma * |x_i|^n = (-1)^(sigma+n) * x_i^n on x_i <= 0
                if (((n + t.sigma[i]) % 2) != 0) negate = !negate;
            }
            ev[i] = static_cast<int>(n);
        }
        p.add_term(ev, negate ? Rational(-t.coeff) : t.coeff);
    }
    return p;
}

std::string SignedPowerExpr::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        Rational c = t.coeff;
        bool neg = c < 0;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        Rational a = neg ? Rational(-c) : c;
        std::vector<std::string> factors;
        for (int i = 0; i < nvars_; ++i) {
            const Rational& e = t.exps[i];
            if (t.sigma[i] && e == 1) {
                factors.push_back(names.at(i));
                continue;
            }
            if (t.sigma[i]) factors.push_back("sign(" + names.at(i) + ")");
            if (e != 0) {
                std::string f = "abs(" + names.at(i) + ")";
                if (e != 1) {
                    if (rat_is_integer(e))
                        f += "^" + rat_to_string(e);
                    else
                        f += "^(" + rat_to_string(e) + ")";
                }
                factors.push_back(f);
            }
        }
        std::string mono;
        for (const auto& f : factors) {
            if (!mono.empty()) mono += "*";
            mono += f;
        }
        if (mono.empty()) {
            os << rat_to_string(a);
        } else if (a == 1) {
            os << mono;
        } else {
            os << rat_to_string(a) << "*" << mono;
        }
    }
    return os.str();
}

}  // namespace ftscert
