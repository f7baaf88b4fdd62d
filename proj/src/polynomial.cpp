#include "ftscert/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ftscert {

int expvec_degree(const ExpVec& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
    Polynomial p(nvars);
    p.add_term(ExpVec(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
    Polynomial p(nvars);
    ExpVec e(nvars, 0);
    e[i] = 1;
    p.add_term(e, Rational(1));
    return p;
}

Polynomial Polynomial::monomial(int nvars, const ExpVec& e, const Rational& c) {
    if (static_cast<int>(e.size()) != nvars)
        throw std::invalid_argument("monomial: exponent vector size mismatch");
    Polynomial p(nvars);
    p.add_term(e, c);
    return p;
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, expvec_degree(e));
    return d;
}

int Polynomial::min_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
        int de = expvec_degree(e);
        if (d < 0 || de < d) d = de;
    }
    return d;
}

Rational Polynomial::coeff(const ExpVec& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const ExpVec& e, const Rational& c) {
    if (static_cast<int>(e.size()) != nvars_)
        throw std::invalid_argument("add_term: exponent vector size mismatch");
    if (c == 0) return;
    Rational cc = c;
    cc.canonicalize();  // caller-built mpq_class values may be unreduced
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, cc);
    } else {
        it->second += cc;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (nvars_ != o.nvars_) throw std::invalid_argument("polynomial nvars mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (nvars_ != o.nvars_) throw std::invalid_argument("polynomial nvars mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    r += o;
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r = *this;
    r -= o;
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("polynomial nvars mismatch");
    Polynomial r(nvars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            ExpVec e(nvars_);
            for (int i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Polynomial Polynomial::scaled(const Rational& c) const {
    Polynomial r(nvars_);
    if (c == 0) return r;
    for (const auto& [e, co] : terms_) r.terms_.emplace(e, co * c);
    return r;
}

Polynomial Polynomial::pow(int k) const {
    if (k < 0) throw std::invalid_argument("polynomial pow: negative exponent");
    Polynomial r = Polynomial::constant(nvars_, Rational(1));
    Polynomial base = *this;
    while (k > 0) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

Polynomial Polynomial::partial(int i) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        ExpVec d = e;
        d[i] -= 1;
        r.add_term(d, c * Rational(e[i]));
    }
    return r;
}

std::vector<Polynomial> Polynomial::gradient() const {
    std::vector<Polynomial> g;
    g.reserve(nvars_);
    for (int i = 0; i < nvars_; ++i) g.push_back(partial(i));
    return g;
}

namespace {

double ipow(double x, int k) {
    double r = 1.0;
    double b = x;
    while (k > 0) {
        if (k & 1) r *= b;
        b *= b;
        k >>= 1;
    }
    return r;
}

}  // namespace

double Polynomial::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != nvars_)
        throw std::invalid_argument("polynomial eval: point size mismatch");
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = rat_to_double(c);
        for (int i = 0; i < nvars_; ++i)
            if (e[i] != 0) t *= ipow(x[i], e[i]);
        s += t;
    }
    return s;
}

Rational Polynomial::eval_rat(const std::vector<Rational>& x) const {
    if (static_cast<int>(x.size()) != nvars_)
        throw std::invalid_argument("polynomial eval: point size mismatch");
    Rational s(0);
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (int i = 0; i < nvars_; ++i)
            if (e[i] != 0) t *= rat_pow_int(x[i], e[i]);
        s += t;
    }
    return s;
}

std::string Polynomial::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    // graded-lex for readable output
    std::vector<const std::pair<const ExpVec, Rational>*> view;
    view.reserve(terms_.size());
    for (const auto& t : terms_) view.push_back(&t);
    std::stable_sort(view.begin(), view.end(), [](const auto* a, const auto* b) {
        int da = expvec_degree(a->first), db = expvec_degree(b->first);
        if (da != db) return da < db;
        return a->first < b->first;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto* t : view) {
        Rational c = t->second;
        bool neg = c < 0;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        Rational a = neg ? Rational(-c) : c;
        std::string mono;
        for (int i = 0; i < nvars_; ++i) {
            int e = t->first[i];
            if (e == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += names.at(i);
            if (e != 1) mono += "^" + std::to_string(e);
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

Polynomial poly_norm_sq(int nvars) {
    Polynomial p(nvars);
    for (int i = 0; i < nvars; ++i) {
        ExpVec e(nvars, 0);
        e[i] = 2;
        p.add_term(e, Rational(1));
    }
    return p;
}

}  // namespace ftscert
