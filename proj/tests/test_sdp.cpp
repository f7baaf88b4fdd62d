#include <cmath>

#include "doctest.h"
#include "ftscert/parse.hpp"
#include "ftscert/sdp.hpp"

using namespace ftscert;

namespace {

const std::vector<std::string> X1 = {"x"};
const std::vector<std::string> XY = {"x", "y"};

SosProgram scalar_program() {
    auto f = parse_expression("-sign(x)*abs(x)^(2/3)", X1);
    TransformResult tr = compose_and_clear({f}, {3}, std::vector<int>{1}, 3);
    SosBuildParams params;
    params.deg_v = 4;
    params.tau = 2;
    params.p = 3;
    params.d = 2;
    params.k = Rational(71, 10);
    params.deg_mult = 2;
    return build_sos_program(tr, {parse_polynomial("2 - x^2", X1)}, params);
}

// one-dimensional cap: fixed_base + mu*fixed_mu = Q00, feasible iff mu <= 5
SosProgram cap_program() {
    SosProgram prog;
    prog.nvars = 1;
    SosConstraint c;
    c.name = "cap";
    c.declared_degree = 0;
    c.fixed_base = Polynomial::constant(1, Rational(5));
    c.fixed_mu = Polynomial::constant(1, Rational(-1));
    c.slots.push_back(GramSlot{"cap.main", Polynomial::constant(1, Rational(1)),
                               std::vector<ExpVec>{{0}}});
    prog.constraints.push_back(std::move(c));
    return prog;
}

std::vector<std::vector<ExpVec>> block_bases(const SdpProblem& sdp) {
    std::vector<std::vector<ExpVec>> out;
    for (const auto& b : sdp.blocks) out.push_back(b.basis);
    return out;
}

}  // namespace

TEST_SUITE("sdp") {

TEST_CASE("a perfect square solves and verifies") {
    Polynomial sq = parse_polynomial("(x + y)^2", XY);
    SosProgram prog = sos_feasibility_program(sq);
    SdpProblem sdp = assemble_sdp(prog, Rational(0));
    SdpSolution sol = solve_sdp(sdp);
    REQUIRE(sol.status == SdpStatus::Feasible);
    CHECK(sol.residual <= 1e-7);

    SosCheck chk = verify_program(prog, 0.0, sol.free_vals, sol.grams,
                                  block_bases(sdp), 1e-7, 1e-7);
    CHECK(chk.ok);
}

TEST_CASE("an odd target is infeasible without presolve help") {
    SosProgram prog = sos_feasibility_program(parse_polynomial("x", X1));
    SdpProblem raw = assemble_sdp(prog, Rational(0), false);
    CHECK(!raw.presolve_infeasible);
    SdpSolution sol = solve_sdp(raw);
    CHECK(sol.status == SdpStatus::Infeasible);

    // with presolve the rejection is exact and instant
    SdpProblem pruned = assemble_sdp(prog, Rational(0), true);
    CHECK(pruned.presolve_infeasible);
    CHECK(solve_sdp(pruned).status == SdpStatus::Infeasible);
}

TEST_CASE("bisection brackets the feasibility edge") {
    SosProgram prog = cap_program();
    MuSearchResult res = bisect_mu(prog, 0.0, 20.0, SdpOptions{}, 1e-3);
    CHECK(res.certified);
    CHECK(res.mu >= 4.97);
    CHECK(res.mu <= 5.0 + 1e-9);
    CHECK(res.probes >= 3);
    CHECK(res.log.size() == static_cast<size_t>(res.probes));
}

TEST_CASE("the scalar program certifies near its analytic ceiling") {
    SosProgram prog = scalar_program();
    MuSearchResult res = bisect_mu(prog, 0.5, 16.0);
    REQUIRE(res.certified);
    // the degree-4 template tops out at mu = 4k/3
    double ceiling = 4.0 * 7.1 / 3.0;
    CHECK(res.mu > 9.0);
    CHECK(res.mu <= ceiling + 1e-6);

    SdpProblem at_mu = assemble_sdp(prog, rat_from_double(res.mu));
    SosCheck chk = verify_program(prog, res.mu, res.solution.free_vals,
                                  res.solution.grams, block_bases(at_mu), 1e-7, 1e-6);
    CHECK(chk.ok);

    // feasibility is monotone in mu
    SdpProblem half = assemble_sdp(prog, rat_from_double(res.mu / 2.0));
    CHECK(solve_sdp(half).status == SdpStatus::Feasible);
}

TEST_CASE("solves are deterministic") {
    SosProgram prog = scalar_program();
    MuSearchResult a = bisect_mu(prog, 0.5, 16.0);
    MuSearchResult b = bisect_mu(prog, 0.5, 16.0);
    CHECK(a.mu == b.mu);
    CHECK(a.probes == b.probes);
    CHECK(a.solution.iterations == b.solution.iterations);
    CHECK(a.solution.residual == b.solution.residual);
    REQUIRE(a.solution.grams.size() == b.solution.grams.size());
    for (size_t g = 0; g < a.solution.grams.size(); ++g)
        CHECK(a.solution.grams[g] == b.solution.grams[g]);
    CHECK(a.log == b.log);
}

TEST_CASE("objective mode maximizes over the feasible set") {
    // X psd, X00 = X11 = 1, maximize 2*X01: optimum 2 at the all-ones matrix
    SdpProblem sdp;
    sdp.n_free = 0;
    sdp.blocks.push_back(SdpBlockInfo{"obj", 0, {{0}, {1}}});
    SdpRow r0;
    r0.constraint = 0;
    r0.mono = {0};
    r0.mat.push_back(SdpCoef{0, 0, 0, Rational(1)});
    r0.rhs = Rational(1);
    SdpRow r1;
    r1.constraint = 0;
    r1.mono = {2};
    r1.mat.push_back(SdpCoef{0, 1, 1, Rational(1)});
    r1.rhs = Rational(1);
    sdp.rows = {r0, r1};
    sdp.obj_mat.push_back(SdpCoef{0, 0, 1, Rational(2)});

    SdpOptions opts;
    opts.maximize_objective = true;
    SdpSolution sol = solve_sdp(sdp, opts);
    REQUIRE(sol.status == SdpStatus::Feasible);
    CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("empty problems are trivially feasible") {
    SosProgram prog;
    prog.nvars = 1;
    SosConstraint c;
    c.name = "zero";
    c.fixed_base = Polynomial(1);
    c.fixed_mu = Polynomial(1);
    c.slots.push_back(GramSlot{"zero.main", Polynomial::constant(1, Rational(1)),
                               std::vector<ExpVec>{{0}}});
    prog.constraints.push_back(std::move(c));
    SdpProblem sdp = assemble_sdp(prog, Rational(0));
    SdpSolution sol = solve_sdp(sdp);
    CHECK(sol.status == SdpStatus::Feasible);
}

}  // TEST_SUITE
