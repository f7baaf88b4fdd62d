#include "ftscert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ftscert/util.hpp"

namespace ftscert {

namespace {

bool inside_domain(const std::vector<Polynomial>& g, const std::vector<double>& x) {
    for (const auto& gi : g)
        if (gi.eval(x) < 0.0) return false;
    return true;
}

// visit a uniform grid over [-r, r]^n with G points per axis
template <typename F>
void for_grid(int n, int G, double r, F&& fn) {
    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    while (true) {
        for (int i = 0; i < n; ++i)
            x[i] = G == 1 ? 0.0 : -r + 2.0 * r * idx[i] / (G - 1);
        fn(x);
        int a = 0;
        while (a < n && ++idx[a] == G) idx[a++] = 0;
        if (a == n) break;
    }
}

// every sampled point of every face of [-r, r]^n lies outside the domain
bool faces_outside(const std::vector<Polynomial>& g, int n, double r) {
    const int G = 9;
    bool clean = true;
    for (int axis = 0; axis < n && clean; ++axis) {
        for (int side = 0; side < 2 && clean; ++side) {
            std::vector<int> idx(std::max(0, n - 1), 0);
            std::vector<double> x(n);
            while (clean) {
                int t = 0;
                for (int a = 0; a < n; ++a) {
                    if (a == axis) {
                        x[a] = side ? r : -r;
                    } else {
                        x[a] = G == 1 ? 0.0 : -r + 2.0 * r * idx[t] / (G - 1);
                        ++t;
                    }
                }
                if (inside_domain(g, x)) clean = false;
                int a = 0;
                while (a < t && ++idx[a] == G) idx[a++] = 0;
                if (t == 0 || a == t) break;
            }
        }
    }
    return clean;
}

double enclosing_radius(const std::vector<Polynomial>& g, int n) {
    double r = 1.0;
    for (int grow = 0; grow < 24 && !faces_outside(g, n, r); ++grow) r *= 2.0;
    return r;
}

}  // namespace

double domain_enclosing_radius(const std::vector<Polynomial>& g, int n) {
    return enclosing_radius(g, n);
}

namespace {

// largest half-width w with [-w, w]^n inside the domain (grid test)
double inner_box_halfwidth(const std::vector<Polynomial>& g, int n) {
    if (g.empty()) return 1.0;
    const int G = 9;
    auto box_inside = [&](double w) {
        bool ok = true;
        for_grid(n, G, w, [&](const std::vector<double>& x) {
            if (ok && !inside_domain(g, x)) ok = false;
        });
        return ok;
    };
    double hi = enclosing_radius(g, n);
    if (box_inside(hi)) return hi;
    double lo = 0.0;
    for (int it = 0; it < 50 && hi - lo > 1e-9 * (1.0 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (box_inside(mid) ? lo : hi) = mid;
    }
    return lo;
}

SublevelCheck sublevel_validate_hint(const Certificate& cert, double c,
                                     std::vector<int>& hint) {
    SublevelCheck out;
    out.c = c;
    const auto& g = cert.omega_ineqs;
    int n = cert.v.nvars();
    Polynomial cv = Polynomial::constant(n, rat_from_double(c)) - cert.v;
    SdpOptions sopts;
    if (hint.size() != g.size()) hint.assign(g.size(), 0);
    for (size_t gi = 0; gi < g.size(); ++gi) {
        bool done = false;
        for (int sd = hint[gi]; sd <= 4 && !done; sd += 2) {
            SosProgram prog;
            prog.nvars = n;
            SosConstraint con;
            con.name = "sublevel.g" + std::to_string(gi);
            con.fixed_base = g[gi];
            con.fixed_mu = Polynomial(n);
            int declared = std::max(std::max(0, g[gi].degree()), sd + cv.degree());
            declared += declared & 1;
            con.declared_degree = declared;
            con.slots.push_back(GramSlot{"sublevel.main",
                                         Polynomial::constant(n, Rational(1)),
                                         monomial_basis(n, declared / 2)});
            con.slots.push_back(GramSlot{"sublevel.sigma", cv, monomial_basis(n, sd / 2)});
            prog.constraints.push_back(std::move(con));
            SdpProblem sdp = assemble_sdp(prog, Rational(0), true);
            if (sdp.presolve_infeasible) continue;
            SdpSolution s = solve_sdp(sdp, sopts);
            if (s.status == SdpStatus::Feasible) {
                out.sigma_degrees.push_back(sd);
                hint[gi] = sd;
                done = true;
            }
        }
        if (!done) {
            out.ok = false;
            out.detail = "no multiplier up to degree 4 covers inequality " + std::to_string(gi) +
                         " at level " + std::to_string(c);
            return out;
        }
    }
    out.ok = true;
    out.detail = "all inequalities covered";
    return out;
}

// expand Z^T Q Z back into a polynomial (numeric Gram, exact coefficients)
Polynomial gram_poly(const GramBlock& gb, int n) {
    Polynomial out(n);
    size_t dim = gb.basis.size();
    for (size_t u = 0; u < dim; ++u) {
        for (size_t v = u; v < dim; ++v) {
            double qv = gb.q[u * dim + v];
            if (qv == 0.0) continue;
            ExpVec e = gb.basis[u];
            for (int i = 0; i < n; ++i) e[i] += gb.basis[v][i];
            out.add_term(e, rat_from_double(u == v ? qv : 2.0 * qv));
        }
    }
    return out;
}

}  // namespace

CertifyOutcome certify(const ProblemSpec& prob, double feas_tol, bool with_sublevel) {
    CertifyOutcome out;

    int deg_v = prob.deg_v ? *prob.deg_v : 2 * prob.d;
    if (deg_v < 2 || deg_v % 2 != 0)
        throw CertifyError("deg_v must be a positive even integer");
    int tau = prob.tau ? *prob.tau : deg_v / 2;
    if (2 * prob.d <= prob.p)
        throw CertifyError("need p < 2d so the settling exponent stays below one");
    if (2 * tau > deg_v)
        throw CertifyError("need 2 tau <= deg_v so the positivity constraint can hold");
    if (prob.mu_lo < 0.0 || prob.mu_hi <= prob.mu_lo)
        throw CertifyError("mu bracket must satisfy 0 <= lo < hi");

    std::vector<int> q = prob.q ? *prob.q : infer_q(prob.f);
    TransformResult tr = compose_and_clear(prob.f, q, prob.lambda, prob.p);

    SosBuildParams params;
    params.deg_v = deg_v;
    params.tau = tau;
    params.p = prob.p;
    params.d = prob.d;
    params.k = prob.k;
    params.epsilon = prob.epsilon;
    params.deg_mult = prob.deg_mult;
    SosProgram prog = build_sos_program(tr, prob.g, params);

    SdpOptions sopts;
    sopts.feas_tol = feas_tol;
    MuSearchResult search = bisect_mu(prog, prob.mu_lo, prob.mu_hi, sopts);
    out.probe_log = search.log;
    if (!search.certified) {
        out.certified = false;
        out.reason = "FTS not certified at these degrees";
        return out;
    }

    Rational mu_rat = rat_from_double(search.mu);
    SdpProblem sdp = assemble_sdp(prog, mu_rat, true);
    const SdpSolution& sol = search.solution;
    if (sol.grams.size() != sdp.blocks.size())
        throw CertifyError("internal: gram blocks out of step with the assembled problem");

    Certificate cert;
    cert.origin = prob.origin;
    cert.states = prob.states;
    cert.q = tr.q;
    cert.lambda = tr.lambda;
    cert.p = prob.p;
    cert.d = prob.d;
    cert.tau = tau;
    cert.deg_v = deg_v;
    cert.k = prob.k;
    cert.epsilon = prob.epsilon;
    cert.mu = mu_rat;
    cert.mu_tilde = mu_rat / prob.k;
    cert.gamma = Rational(prob.p) / Rational(2 * prob.d);

    int n = static_cast<int>(prob.states.size());
    Polynomial v(n);
    for (size_t m = 0; m < prog.v_monomials.size(); ++m)
        v.add_term(prog.v_monomials[m], rat_from_double(sol.free_vals.at(m)));
    cert.v = v;
    cert.v_tilde = spe_substitute_power(SignedPowerExpr::from_poly(v), tr.q, false);
    cert.omega_ineqs = prob.g;
    cert.f = prob.f;

    for (size_t b = 0; b < sdp.blocks.size(); ++b)
        cert.grams.push_back(GramBlock{sdp.blocks[b].id, sdp.blocks[b].basis, sol.grams[b]});
    for (const auto& gb : cert.grams) {
        bool is_main = gb.id.size() >= 5 && gb.id.compare(gb.id.size() - 5, 5, ".main") == 0;
        if (!is_main) cert.multipliers.emplace_back(gb.id, gram_poly(gb, n));
    }

    cert.probes = search.probes;
    cert.iterations = sol.iterations;
    cert.residual = sol.residual;
    cert.feas_tol = feas_tol;
    cert.probe_log = search.log;

    std::vector<std::vector<double>> grams;
    std::vector<std::vector<ExpVec>> bases;
    for (const auto& gb : cert.grams) {
        grams.push_back(gb.q);
        bases.push_back(gb.basis);
    }
    SosCheck chk = verify_program(prog, search.mu, sol.free_vals, grams, bases, 1e-7, 1e-6);
    if (!chk.ok) {
        out.certified = false;
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "solver output failed verification (min eig %.3g, residual %.3g)",
                      chk.min_eig, chk.max_resid);
        out.reason = buf;
        return out;
    }

    if (with_sublevel) {
        cert.has_c_star = true;
        if (prob.g.empty()) {
            cert.c_star_unbounded = true;
        } else {
            cert.c_star = max_valid_level(cert);
        }
    }

    out.certified = true;
    out.cert = std::move(cert);
    return out;
}

double settling_bound(const Certificate& cert, const std::vector<double>& z0) {
    if (z0.size() != cert.states.size())
        throw CertifyError("initial point dimension does not match the certificate");
    double vt = spe_eval(cert.v_tilde, z0);
    if (vt <= 0.0) return 0.0;
    double gamma = rat_to_double(cert.gamma);
    double mu_t = rat_to_double(cert.mu_tilde);
    if (mu_t <= 0.0 || gamma >= 1.0)
        throw CertifyError("certificate does not give a finite settling bound");
    // the decrease and upper-bound constraints give d/dt(V/k) <= -mu_tilde (V/k)^gamma,
    // so the settling clock integrates in the k-normalized scale, not in V itself
    double w = vt / rat_to_double(cert.k);
    return std::pow(w, 1.0 - gamma) / (mu_t * (1.0 - gamma));
}

SublevelCheck sublevel_validate(const Certificate& cert, double c) {
    std::vector<int> hint;
    return sublevel_validate_hint(cert, c, hint);
}

double max_valid_level(const Certificate& cert, double tol) {
    if (cert.omega_ineqs.empty()) return std::numeric_limits<double>::infinity();
    int n = cert.v.nvars();
    double r = enclosing_radius(cert.omega_ineqs, n);
    const int G = n == 1 ? 257 : (n == 2 ? 65 : 17);
    double vmax = 0.0;
    for_grid(n, G, r, [&](const std::vector<double>& x) {
        vmax = std::max(vmax, cert.v.eval(x));
    });
    if (vmax <= 0.0) return 0.0;

    std::vector<int> hint;
    auto valid = [&](double c) { return sublevel_validate_hint(cert, c, hint).ok; };

    double lo = 0.0, hi = vmax;
    if (valid(hi)) return hi;
    for (int it = 0; it < 40 && hi - lo > tol * (1.0 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (valid(mid) ? lo : hi) = mid;
    }
    return lo;
}

NumericCheck check_lyapunov_numeric(const Certificate& cert, int nsamples, uint64_t seed) {
    NumericCheck out;
    int n = cert.v.nvars();
    if (cert.f.size() != static_cast<size_t>(n))
        throw CertifyError("certificate carries no dynamics to check against");
    double w = inner_box_halfwidth(cert.omega_ineqs, n);
    if (w <= 0.0) {
        out.detail = "no interior box found in the domain";
        return out;
    }
    std::vector<double> zw(n);
    for (int i = 0; i < n; ++i) zw[i] = std::pow(w, cert.q[i]);

    double gamma = rat_to_double(cert.gamma);
    double mu_t = rat_to_double(cert.mu_tilde);
    double kd = rat_to_double(cert.k);
    Rng rng(seed);
    out.worst_margin = -std::numeric_limits<double>::infinity();

    int tried = 0;
    std::vector<double> z(n), zp(n), zm(n), fz(n);
    while (out.samples < nsamples && tried < 40 * nsamples) {
        ++tried;
        bool degenerate = false;
        for (int i = 0; i < n; ++i) {
            z[i] = rng.uniform(-zw[i], zw[i]);
            if (std::fabs(z[i]) < 1e-6) degenerate = true;
        }
        if (degenerate) continue;
        ++out.samples;

        double vt = spe_eval(cert.v_tilde, z);
        double deriv = 0.0;
        for (int i = 0; i < n; ++i) fz[i] = spe_eval(cert.f[i], z);
        for (int i = 0; i < n; ++i) {
            // step scaled to the coordinate so the difference never crosses
            // the sign kink, where the fractional powers lose smoothness
            double h = 1e-4 * std::fabs(z[i]);
            zp = z;
            zm = z;
            zp[i] += h;
            zm[i] -= h;
            deriv += fz[i] * (spe_eval(cert.v_tilde, zp) - spe_eval(cert.v_tilde, zm)) / (2.0 * h);
        }
        // same k-normalized scale as settling_bound: d/dt(Vt/k) <= -mu_tilde (Vt/k)^gamma
        double decay = mu_t * kd * std::pow(std::max(vt, 0.0) / kd, gamma);
        double margin = deriv + decay;
        double tol = 1e-6 * (1.0 + std::fabs(deriv) + std::fabs(decay));
        out.worst_margin = std::max(out.worst_margin, margin);
        if (vt <= 0.0 || margin > tol) ++out.violations;
    }
    out.ok = out.samples > 0 && out.violations == 0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d samples, %d violations, worst margin %.6g",
                  out.samples, out.violations, out.worst_margin);
    out.detail = buf;
    return out;
}

}  // namespace ftscert
