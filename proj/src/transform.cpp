#include "ftscert/transform.hpp"

#include <algorithm>

namespace ftscert {

std::vector<int> infer_q(const std::vector<SignedPowerExpr>& f) {
    if (f.empty()) throw TransformError("infer_q: empty system");
    int n = f[0].nvars();
    std::vector<long> q(n, 1);
    for (const auto& comp : f) {
        for (const auto& t : comp.terms()) {
            for (int i = 0; i < n; ++i) {
                if (t.exps[i] == 0) continue;
                q[i] = lcm_long(q[i], rat_den_long(t.exps[i]));
            }
        }
    }
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i) {
        if (q[i] > 1000000) throw TransformError("infer_q: implausibly large power " + std::to_string(q[i]));
        out[i] = static_cast<int>(q[i]);
    }
    return out;
}

std::vector<SignedPowerExpr> build_ftilde(const std::vector<SignedPowerExpr>& f,
                                          const std::vector<int>& q) {
    int n = static_cast<int>(f.size());
    if (static_cast<int>(q.size()) != n) throw TransformError("build_ftilde: q size mismatch");
    std::vector<SignedPowerExpr> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<Rational> exps(n, Rational(0));
        exps[i] = Rational(1, q[i]) - 1;
        SignedPowerExpr weight = SignedPowerExpr::make_term(
            n, Rational(1, q[i]), std::vector<uint8_t>(n, 0), std::move(exps));
        out.push_back(spe_mul(f[i], weight));
    }
    return out;
}

namespace {

SignedPowerExpr abs_monomial(int n, const std::vector<int>& lambda) {
    std::vector<Rational> exps(n, Rational(0));
    for (int i = 0; i < n; ++i) exps[i] = Rational(lambda[i]);
    return SignedPowerExpr::make_term(n, Rational(1), std::vector<uint8_t>(n, 0),
                                      std::move(exps));
}

SignedPowerExpr build_norm_spe(int n, int p) {
    if (p % 2 == 0) return SignedPowerExpr::from_poly(poly_norm_sq(n).pow(p / 2));
    if (n == 1) {
        return SignedPowerExpr::make_term(1, Rational(1), {0}, {Rational(p)});
    }
    throw TransformError(
        "norm weight ||x||^p with odd p is not a signed power expression for n >= 2; "
        "choose an even p");
}

// variable i is clean when every term of every expression is polynomial in it
bool var_is_clean(const std::vector<const SignedPowerExpr*>& exprs, int i) {
    for (const auto* e : exprs)
        for (const auto& t : e->terms())
            if (!spe_term_var_polynomial(t, i)) return false;
    return true;
}

// same check after bumping the exponent of x_i by one in every term
bool var_clean_after_bump(const std::vector<const SignedPowerExpr*>& exprs, int i) {
    for (const auto* e : exprs) {
        for (const auto& t : e->terms()) {
            Rational ex = t.exps[i] + 1;
            if (!rat_is_integer(ex) || ex < 0) return false;
            if ((rat_to_long(ex) % 2) != t.sigma[i]) return false;
        }
    }
    return true;
}

}  // namespace

TransformResult compose_and_clear(const std::vector<SignedPowerExpr>& f,
                                  const std::vector<int>& q,
                                  const std::optional<std::vector<int>>& lambda,
                                  int p,
                                  int lambda_cap) {
    int n = static_cast<int>(f.size());
    if (n == 0) throw TransformError("compose_and_clear: empty system");
    if (static_cast<int>(q.size()) != n) throw TransformError("compose_and_clear: q size mismatch");
    if (p < 1) throw TransformError("compose_and_clear: p must be >= 1");

    TransformResult res;
    res.q = q;
    res.ftilde = build_ftilde(f, q);

    std::vector<SignedPowerExpr> base;
    base.reserve(n);
    for (const auto& ft : res.ftilde)
        base.push_back(spe_substitute_power(ft, q, true, true));
    SignedPowerExpr norm_base = build_norm_spe(n, p);

    // all exponents must be integers once multiplied by q; fractional leftovers
    // cannot be cleared by any lambda
    for (const auto& comp : base)
        for (const auto& t : comp.terms())
            for (int i = 0; i < n; ++i)
                if (!rat_is_integer(t.exps[i]))
                    throw TransformError(
                        "clearing failure: composed dynamics keep a fractional exponent "
                        "(is q consistent with the vector field?)");

    std::vector<int> lam(n, 0);
    if (lambda) {
        if (static_cast<int>(lambda->size()) != n)
            throw TransformError("compose_and_clear: lambda size mismatch");
        lam = *lambda;
        for (int li : lam)
            if (li < 0 || li > lambda_cap)
                throw TransformError("lambda override outside [0, " +
                                     std::to_string(lambda_cap) + "]");
    } else {
        for (const auto& comp : base)
            for (const auto& t : comp.terms())
                for (int i = 0; i < n; ++i)
                    if (t.exps[i] < 0)
                        lam[i] = std::max(lam[i], static_cast<int>(-rat_to_long(t.exps[i])));
        for (int i = 0; i < n; ++i)
            if (lam[i] > lambda_cap)
                throw TransformError("clearing failure: lambda_" + std::to_string(i + 1) +
                                     " exceeds cap " + std::to_string(lambda_cap));
    }

    auto apply_lambda = [&](const std::vector<int>& lv) {
        SignedPowerExpr weight = abs_monomial(n, lv);
        std::vector<SignedPowerExpr> comps;
        comps.reserve(n);
        for (const auto& c : base) comps.push_back(spe_mul(c, weight));
        SignedPowerExpr nrm = spe_mul(norm_base, weight);
        return std::make_pair(comps, nrm);
    };

    auto [comps, nrm] = apply_lambda(lam);

    if (!lambda) {
        // bump lambda_i by one exactly when that turns every occurrence of x_i
        // polynomial; each variable is independent of the others here
        std::vector<const SignedPowerExpr*> view;
        for (const auto& c : comps) view.push_back(&c);
        view.push_back(&nrm);
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            if (var_is_clean(view, i)) continue;
            if (lam[i] + 1 <= lambda_cap && var_clean_after_bump(view, i)) {
                lam[i] += 1;
                changed = true;
            }
        }
        if (changed) std::tie(comps, nrm) = apply_lambda(lam);
    }

    // negative exponents must be gone now
    for (const auto& c : comps)
        if (c.has_negative_exponent())
            throw TransformError("clearing failure: lambda does not clear negative exponents");

    res.lambda = lam;
    res.composed = comps;
    res.norm_spe = nrm;

    std::vector<const SignedPowerExpr*> view;
    for (const auto& c : res.composed) view.push_back(&c);
    view.push_back(&res.norm_spe);
    for (int i = 0; i < n; ++i)
        if (!var_is_clean(view, i)) res.sectorized.push_back(i);

    size_t nsec = res.sectorized.size();
    if (nsec > 16) throw TransformError("clearing failure: too many sectorized variables");
    for (size_t bits = 0; bits < (size_t(1) << nsec); ++bits) {
        SectorConstraint sec;
        sec.signs.assign(n, 0);
        for (size_t j = 0; j < nsec; ++j)
            sec.signs[res.sectorized[j]] = (bits >> j) & 1 ? -1 : 1;
        for (const auto& c : res.composed) sec.field.push_back(spe_resolve_sectors(c, sec.signs));
        sec.norm_poly = spe_resolve_sectors(res.norm_spe, sec.signs);
        for (size_t j = 0; j < nsec; ++j) {
            int i = res.sectorized[j];
            Polynomial xi = Polynomial::variable(n, i);
            sec.extra_ineqs.push_back(sec.signs[i] < 0 ? -xi : xi);
        }
        res.sectors.push_back(std::move(sec));
    }
    return res;
}

}  // namespace ftscert
