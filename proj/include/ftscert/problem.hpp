#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ftscert/parse.hpp"
#include "ftscert/polynomial.hpp"
#include "ftscert/signed_power.hpp"

namespace ftscert {

// A parsed and validated problem file. q, lambda, tau, deg_v, deg_mult stay
// unset when the file omits them; the certification pipeline fills them in
// (inference or defaults) and CLI flags override file values before that.
struct ProblemSpec {
    std::string origin;
    std::vector<std::string> states;
    std::vector<std::string> f_text;
    std::vector<SignedPowerExpr> f;
    std::vector<std::string> g_text;
    std::vector<Polynomial> g;

    int p = 0;
    int d = 0;
    std::optional<std::vector<int>> q;
    std::optional<std::vector<int>> lambda;
    std::optional<int> tau;
    std::optional<int> deg_v;
    std::optional<int> deg_mult;
    Rational k = Rational(1);
    Rational epsilon = Rational(1, 10000);
    double mu_lo = 0.0;
    double mu_hi = 100.0;
};

// Reads the TOML subset used by problem files: [system]/[domain]/[params]
// sections, string and numeric scalars, single-line arrays, # comments.
ProblemSpec parse_problem_text(const std::string& text, const std::string& origin);

ProblemSpec load_problem(const std::string& path);

}  // namespace ftscert
