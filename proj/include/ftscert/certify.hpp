#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftscert/problem.hpp"
#include "ftscert/sdp.hpp"
#include "ftscert/sosprog.hpp"
#include "ftscert/transform.hpp"

namespace ftscert {

struct CertifyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GramBlock {
    std::string id;
    std::vector<ExpVec> basis;
    std::vector<double> q;  // row-major, basis.size() squared
};

// Everything needed to state and re-check the finite-time stability claim:
// V certifies the transformed system on the domain, mu_tilde and gamma give
// the settling bound T(z) <= (Vt(z)/k)^(1-gamma) / (mu_tilde (1-gamma)).
// The k-normalization matters: the certified inequalities bound the decay of
// V/k, and for k < 1 dropping the normalization overstates the decay rate.
struct Certificate {
    std::string origin;
    std::vector<std::string> states;
    std::vector<int> q;
    std::vector<int> lambda;
    int p = 0, d = 0, tau = 0, deg_v = 0;
    Rational k, epsilon;

    Rational mu;        // largest feasible decrease rate found
    Rational mu_tilde;  // mu / k
    Rational gamma;     // p / (2d)

    Polynomial v;             // Lyapunov candidate in the transformed variables
    SignedPowerExpr v_tilde;  // the same function pulled back to the original ones

    // All SoS multipliers that entered the constraints (slot id -> polynomial),
    // and the domain inequalities they were paired with. Keeping the
    // inequalities here makes the certificate self-contained for the sublevel
    // computation.
    std::vector<std::pair<std::string, Polynomial>> multipliers;
    std::vector<Polynomial> omega_ineqs;

    // The dynamics the certificate was issued for. Not part of the claim
    // itself, but needed to re-check it numerically.
    std::vector<SignedPowerExpr> f;

    std::vector<GramBlock> grams;

    int probes = 0;
    int iterations = 0;      // interior point iterations of the kept probe
    double residual = 0.0;   // equality residual of the kept probe
    double feas_tol = 1e-8;  // solver tolerance the probes ran with
    std::vector<std::string> probe_log;

    bool has_c_star = false;        // sublevel analysis was run
    bool c_star_unbounded = false;  // no domain inequalities: every level valid
    double c_star = 0.0;            // largest sublevel value proven inside the domain
};

struct CertifyOutcome {
    bool certified = false;
    std::string reason;  // set when not certified
    std::optional<Certificate> cert;
    std::vector<std::string> probe_log;
};

// Full pipeline: resolve defaults, transform, build the feasibility programs,
// bisect on mu, verify the solver output, and attach the sublevel analysis.
CertifyOutcome certify(const ProblemSpec& prob, double feas_tol = 1e-8,
                       bool with_sublevel = true);

double settling_bound(const Certificate& cert, const std::vector<double>& z0);

struct SublevelCheck {
    bool ok = false;
    double c = 0.0;
    std::vector<int> sigma_degrees;  // multiplier degree used per inequality
    std::string detail;
};

// Proves {V <= c} inside the domain: per inequality g_i, finds SoS sigma with
// g_i - sigma (c - V) SoS, escalating deg sigma through 0, 2, 4. Works off the
// certificate alone since it carries the domain inequalities.
SublevelCheck sublevel_validate(const Certificate& cert, double c);

// Largest c the sublevel proof accepts: bracket [0, max of V over a sample
// grid of the domain's bounding box], then bisect to the given tolerance.
// Returns +inf when there are no inequalities at all, 0 when no level passes.
double max_valid_level(const Certificate& cert, double tol = 1e-4);

// Radius r such that every sampled face point of [-r, r]^n falls outside the
// domain; the box encloses the feasible region for sampling purposes.
double domain_enclosing_radius(const std::vector<Polynomial>& g, int n);

struct NumericCheck {
    bool ok = false;
    int samples = 0;
    int violations = 0;
    double worst_margin = 0.0;
    std::string detail;
};

// Monte Carlo spot check of the certified inequality on the original
// dynamics: at sampled z, Vt must be positive and grad Vt . f(z) must not
// exceed -k mu_tilde (Vt/k)^gamma beyond roundoff tolerance.
NumericCheck check_lyapunov_numeric(const Certificate& cert, int nsamples = 500,
                                    uint64_t seed = 20250817);

}  // namespace ftscert
