#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftscert/polynomial.hpp"
#include "ftscert/signed_power.hpp"

namespace ftscert {

struct TransformError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One orthant piece of the cleared dynamics. signs[i] is +1/-1 on sectorized
// variables and 0 elsewhere; on the sector, field and norm_poly are honest
// polynomials equal to the signed power forms, and extra_ineqs lists the
// polynomials signs[i]*x_i that are nonnegative there.
struct SectorConstraint {
    std::vector<int> signs;
    std::vector<Polynomial> field;
    Polynomial norm_poly;
    std::vector<Polynomial> extra_ineqs;
};

struct TransformResult {
    std::vector<int> q;
    std::vector<int> lambda;
    std::vector<SignedPowerExpr> ftilde;    // x-dynamics as a function of z
    std::vector<SignedPowerExpr> composed;  // ftilde(sign(x)|x|^q) * prod_i |x_i|^lambda_i
    SignedPowerExpr norm_spe;               // ||x||^p * prod_i |x_i|^lambda_i
    std::vector<int> sectorized;            // variable indices split into sign sectors
    std::vector<SectorConstraint> sectors;  // 2^sectorized.size() entries
};

// Smallest per-variable power vector making the composed dynamics polynomial
// after clearing: q_i is the lcm of the exponent denominators of variable i
// across every component of f.
std::vector<int> infer_q(const std::vector<SignedPowerExpr>& f);

// x-coordinate dynamics expressed in z: ftilde_i(z) = (1/q_i) f_i(z) |z_i|^(1/q_i - 1).
// Negative exponents are expected here; they are cleared later.
std::vector<SignedPowerExpr> build_ftilde(const std::vector<SignedPowerExpr>& f,
                                          const std::vector<int>& q);

// Substitutes z = sign(x)|x|^q into ftilde, clears negative exponents with the
// per-variable multiplier prod |x_i|^lambda_i, absorbs the norm weight
// ||x||^p, and splits sign-mismatched variables into sector constraints.
// When lambda is not given it is chosen automatically: the smallest clearing
// value, plus one exactly where that single increment turns every occurrence
// of the variable polynomial. Throws TransformError when p is odd with n >= 2
// (norm not representable) or when no lambda under the cap clears.
TransformResult compose_and_clear(const std::vector<SignedPowerExpr>& f,
                                  const std::vector<int>& q,
                                  const std::optional<std::vector<int>>& lambda,
                                  int p,
                                  int lambda_cap = 8);

}  // namespace ftscert
