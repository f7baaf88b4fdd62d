#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftscert/polynomial.hpp"
#include "ftscert/transform.hpp"

namespace ftscert {

struct SosError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Monomials with total degree in [mindeg, maxdeg], graded lexicographic.
std::vector<ExpVec> monomial_basis(int nvars, int maxdeg, int mindeg = 0);

// One Gram unknown: weight(x) * Z(x)^T Q Z(x) with Z over basis.
struct GramSlot {
    std::string id;
    Polynomial weight;
    std::vector<ExpVec> basis;
};

// Polynomial identity, coefficient-matched per monomial:
//   fixed_base + mu*fixed_mu + sum_m c_m * v_coeff_polys[m]
//     == sum_b weight_b * Z_b^T Q_b Z_b
// where c_m are the shared coefficients of V and every Q_b is PSD.
struct SosConstraint {
    std::string name;
    int declared_degree = 0;
    Polynomial fixed_base;
    Polynomial fixed_mu;
    std::vector<Polynomial> v_coeff_polys;
    std::vector<GramSlot> slots;
};

struct SosProgram {
    int nvars = 0;
    std::vector<ExpVec> v_monomials;  // degree 1..deg_v; V(0) = 0 by construction
    std::vector<SosConstraint> constraints;
};

struct SosBuildParams {
    int deg_v = 0;
    int tau = 0;
    int p = 0;
    int d = 0;
    Rational k = Rational(1);
    Rational epsilon = Rational(1, 10000);
    // degree of the decrease multipliers t_i and the sector multipliers v_j;
    // unset means the auto rule (constraint degree minus weight degree,
    // rounded down to even). The upper-bound multipliers always use the auto
    // rule so the certified upper degree tracks deg_v.
    std::optional<int> deg_mult;
};

SosConstraint build_positivity(int nvars, const std::vector<ExpVec>& v_monomials,
                               int tau, const Rational& epsilon);

SosConstraint build_upper_bound(int nvars, const std::vector<ExpVec>& v_monomials,
                                const std::vector<Polynomial>& g, int d,
                                const Rational& k);

SosConstraint build_decrease(int nvars, const std::vector<ExpVec>& v_monomials,
                             const SectorConstraint& sector, int sector_index,
                             const std::vector<Polynomial>& g,
                             std::optional<int> deg_mult);

SosProgram build_sos_program(const TransformResult& tr, const std::vector<Polynomial>& g,
                             const SosBuildParams& params);

// Single "poly is SoS" feasibility program (no V unknowns, no multipliers).
SosProgram sos_feasibility_program(const Polynomial& poly);

// ----- flattened SDP form -----

struct SdpCoef {
    int block;
    int i, j;  // i <= j
    Rational c;
};

struct SdpBlockInfo {
    std::string id;
    int constraint;  // owning constraint index
    std::vector<ExpVec> basis;
};

struct SdpRow {
    int constraint;
    ExpVec mono;
    std::vector<SdpCoef> mat;
    std::vector<std::pair<int, Rational>> free_vars;
    Rational rhs;
};

struct SdpProblem {
    int n_free = 0;
    std::vector<SdpBlockInfo> blocks;
    std::vector<SdpRow> rows;
    std::vector<SdpCoef> obj_mat;  // maximize; empty = pure feasibility
    std::vector<std::pair<int, Rational>> obj_free;
    bool presolve_infeasible = false;
    std::string presolve_reason;
};

// Coefficient-matches every constraint at the given mu. With prune set, runs
// the exact diagonal-consistency presolve: any all-diagonal, same-sign,
// zero-rhs row forces those diagonal entries (hence rows and columns) of the
// Gram blocks to zero; the basis shrinks to a fixpoint. An emptied row with
// nonzero rhs marks the problem presolve-infeasible.
SdpProblem assemble_sdp(const SosProgram& prog, const Rational& mu, bool prune = true);

// Plain-text dump of the assembled problem, one equality per line.
std::string sdp_dump(const SdpProblem& sdp);

struct SosCheck {
    bool ok = false;
    double min_eig = 0.0;
    double max_resid = 0.0;
};

// Is target == Z^T Q Z within match_tol (coefficientwise, relative to the
// largest target coefficient) with Q PSD up to -eig_tol?
SosCheck verify_sos(const Polynomial& target, const std::vector<ExpVec>& basis,
                    const std::vector<double>& q, double eig_tol, double match_tol);

// Reconstructs each constraint identity from solved values (V coefficients
// and per-slot Grams, indexed as in assemble_sdp's block order) and checks
// coefficient residuals and Gram eigenvalues.
SosCheck verify_program(const SosProgram& prog, double mu,
                        const std::vector<double>& v_coeffs,
                        const std::vector<std::vector<double>>& grams,
                        const std::vector<std::vector<ExpVec>>& gram_bases,
                        double eig_tol, double match_tol);

}  // namespace ftscert
