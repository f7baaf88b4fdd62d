// End-to-end acceptance suite. Each criterion prints exactly one line,
// "PASS criterion N: ..." or "FAIL criterion N: ...", and the process exits
// with the number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ftscert/certificate_io.hpp"
#include "ftscert/certify.hpp"
#include "ftscert/parse.hpp"
#include "ftscert/problem.hpp"
#include "ftscert/sdp.hpp"
#include "ftscert/simulate.hpp"
#include "ftscert/transform.hpp"
#include "ftscert/util.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace ftscert;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    double seconds = 0.0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string out_file = "acc_out_" + std::to_string(counter++) + ".tmp";
    std::string cmd = std::string(FTSCERT_BIN) + " " + args + " > " + out_file + " 2>&1";
    auto t0 = std::chrono::steady_clock::now();
    int status = std::system(cmd.c_str());
    auto t1 = std::chrono::steady_clock::now();
    CliResult res;
    res.seconds = std::chrono::duration<double>(t1 - t0).count();
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out_file);
    std::remove(out_file.c_str());
    return res;
}

// the RunReport is the last nonempty stdout line
json last_report(const std::string& out) {
    size_t end = out.find_last_not_of("\r\n");
    if (end == std::string::npos) return json();
    size_t start = out.find_last_of('\n', end);
    start = start == std::string::npos ? 0 : start + 1;
    return json::parse(out.substr(start, end - start + 1), nullptr, false);
}

std::string problem_path(const char* name) {
    return std::string(FTSCERT_PROBLEM_DIR) + "/" + name;
}

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

bool in_window(double v, double lo, double hi) { return v >= lo && v <= hi; }

struct Criterion {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

// ---------------------------------------------------------------- criterion 1

Criterion criterion1() {
    Criterion c;
    CliResult cert = run_cli("certify " + problem_path("ex1.toml") +
                             " --k 7.10 --mu-bracket 0 100 --deg-v 4 --deg-mult 2"
                             " --out acc_ex1.cert.json");
    double elapsed = cert.seconds;
    if (cert.exit_code != 0) {
        c.fail("certify exited " + std::to_string(cert.exit_code));
        return c;
    }
    json rep = last_report(cert.out);
    double mu = rep.is_discarded() ? 0.0 : rep["data"]["mu"].get<double>();
    if (!(mu > 0.0)) c.fail("mu* = " + fmt(mu) + " not positive");
    c.note("mu* = " + fmt(mu));

    CliResult bound = run_cli("bound acc_ex1.cert.json --z0 1.2");
    elapsed += bound.seconds;
    if (bound.exit_code != 0) {
        c.fail("bound exited " + std::to_string(bound.exit_code));
        return c;
    }
    double b = last_report(bound.out)["data"]["bound"].get<double>();
    if (!in_window(b, 3.16, 5.0))
        c.fail("bound(1.2) = " + fmt(b) + " outside [3.16, 5.0]");
    else
        c.note("bound(1.2) = " + fmt(b));

    CliResult val = run_cli("validate " + problem_path("ex1.toml") +
                            " acc_ex1.cert.json --z0 1.2");
    elapsed += val.seconds;
    json vrep = last_report(val.out);
    if (vrep.is_discarded() || vrep["data"]["rows"].empty()) {
        c.fail("validate produced no rows");
        return c;
    }
    const json& row = vrep["data"]["rows"][0];
    if (row["simulated"].is_null()) {
        c.fail("validate: trajectory did not settle");
    } else {
        double sim = row["simulated"].get<double>();
        if (!in_window(sim, 3.10, 3.20))
            c.fail("simulated = " + fmt(sim) + " outside [3.10, 3.20]");
        else
            c.note("simulated = " + fmt(sim));
    }
    if (!row["sound"].get<bool>()) c.fail("validate reports sound = false");
    if (elapsed > 30.0) c.fail("took " + fmt(elapsed) + "s > 30s");
    c.note(fmt(elapsed) + "s");
    return c;
}

// ---------------------------------------------------------------- criterion 2

Criterion criterion2() {
    Criterion c;
    CliResult cert = run_cli("certify " + problem_path("ex2.toml") + " --out acc_ex2.cert.json");
    double elapsed = cert.seconds;
    if (cert.exit_code != 0) {
        c.fail("certify exited " + std::to_string(cert.exit_code) + " after " +
               fmt(cert.seconds) + "s");
        return c;
    }
    c.note("certify " + fmt(cert.seconds) + "s");

    Certificate loaded;
    try {
        loaded = load_certificate("acc_ex2.cert.json");
    } catch (const std::exception& e) {
        c.fail(std::string("certificate unreadable: ") + e.what());
        return c;
    }
    if (loaded.gamma != Rational(2, 3))
        c.fail("gamma = " + rat_to_string(loaded.gamma) + ", want exactly 2/3");

    SublevelCheck sub = sublevel_validate(loaded, 0.674);
    if (!sub.ok)
        c.fail("sublevel_validate(0.674) failed: " + sub.detail);
    else
        c.note("sublevel ok at 0.674");

    CliResult bound = run_cli("bound acc_ex2.cert.json --z0 1.3,0.8");
    elapsed += bound.seconds;
    double b = 0.0;
    if (bound.exit_code == 0) {
        b = last_report(bound.out)["data"]["bound"].get<double>();
        if (!in_window(b, 3.05, 4.5))
            c.fail("bound(1.3,0.8) = " + fmt(b) + " outside [3.05, 4.5]");
        else
            c.note("bound = " + fmt(b));
    } else {
        c.fail("bound exited " + std::to_string(bound.exit_code));
    }

    CliResult val = run_cli("validate " + problem_path("ex2.toml") +
                            " acc_ex2.cert.json --z0 1.3,0.8");
    elapsed += val.seconds;
    json vrep = last_report(val.out);
    if (vrep.is_discarded() || vrep["data"]["rows"].empty()) {
        c.fail("validate produced no rows");
        return c;
    }
    const json& row = vrep["data"]["rows"][0];
    if (row["simulated"].is_null()) {
        c.fail("validate: trajectory did not settle");
    } else {
        double sim = row["simulated"].get<double>();
        if (!in_window(sim, 2.95, 3.10))
            c.fail("simulated = " + fmt(sim) + " outside [2.95, 3.10]");
        else
            c.note("simulated = " + fmt(sim));
    }
    if (!row["sound"].get<bool>()) c.fail("validate reports sound = false");
    if (elapsed > 300.0) c.fail("took " + fmt(elapsed) + "s > 300s");
    return c;
}

// ---------------------------------------------------------------- criterion 3

Criterion criterion3() {
    Criterion c;
    double total = 0.0;
    int idx = 0;
    for (int deg_v : {4, 6}) {
        for (int p : {2, 3}) {
            std::string path = "acc_cubic_" + std::to_string(idx++) + ".toml";
            std::ofstream f(path);
            f << "[system]\nstates = [\"x\"]\nf = [\"-x^3\"]\n\n"
              << "[domain]\ng = [\"1 - x^2\"]\n\n"
              << "[params]\np = " << p << "\nd = 2\ndeg_v = " << deg_v << "\n";
            f.close();
            CliResult r = run_cli("certify " + path + " --out " + path + ".cert.json");
            total += r.seconds;
            if (r.exit_code != 2)
                c.fail("deg_v=" + std::to_string(deg_v) + " p=" + std::to_string(p) +
                       " exited " + std::to_string(r.exit_code) + ", want 2");
            std::remove(path.c_str());
        }
    }
    if (total > 60.0) c.fail("took " + fmt(total) + "s > 60s");
    if (c.ok) c.detail = "4 variants rejected in " + fmt(total) + "s";
    return c;
}

// ---------------------------------------------------------------- criterion 4

Polynomial random_poly(Rng& rng, int n, int maxdeg) {
    Polynomial p(n);
    int nterms = rng.uniform_int(1, 4);
    for (int t = 0; t < nterms; ++t) {
        ExpVec e(n, 0);
        int budget = rng.uniform_int(0, maxdeg);
        for (int i = 0; i < n && budget > 0; ++i) {
            e[i] = rng.uniform_int(0, budget);
            budget -= e[i];
        }
        int num = rng.uniform_int(-6, 6);
        if (num == 0) num = 1;
        p.add_term(e, Rational(num, rng.uniform_int(1, 2)));
    }
    if (p.is_zero()) p.add_term(ExpVec(n, 0), Rational(1));
    return p;
}

Criterion criterion4() {
    Criterion c;
    Rng rng(424242);
    int feas_ok = 0, indef_ok = 0;
    double worst_eig = 0.0, worst_resid = 0.0;

    for (int round = 0; round < 100; ++round) {
        int n = rng.uniform_int(1, 3);
        int squares = rng.uniform_int(1, 3);
        Polynomial sum(n);
        for (int s = 0; s < squares; ++s) {
            Polynomial h = random_poly(rng, n, 3);
            sum += h * h;
        }

        SosProgram prog = sos_feasibility_program(sum);
        SdpProblem sdp = assemble_sdp(prog, Rational(0));
        SdpSolution sol = solve_sdp(sdp);
        bool ok = sol.status == SdpStatus::Feasible;
        if (ok) {
            SosCheck chk = verify_sos(sum, sdp.blocks[0].basis, sol.grams[0], 1e-7, 1e-7);
            worst_eig = std::min(worst_eig, chk.min_eig);
            worst_resid = std::max(worst_resid, chk.max_resid);
            ok = chk.ok;
        }
        if (ok) {
            ++feas_ok;
        } else if (c.ok) {
            c.fail("square sum #" + std::to_string(round) + " not verified feasible (" +
                   sol.detail + ")");
        }

        // spoil it: subtract delta ||x||^(deg+2) sized to go negative at a point
        int deg = sum.degree() + (sum.degree() & 1);
        std::vector<double> pt(n);
        double nrm = 0.0;
        while (nrm < 0.25) {
            nrm = 0.0;
            for (int i = 0; i < n; ++i) {
                pt[i] = rng.uniform(-2.0, 2.0);
                nrm += pt[i] * pt[i];
            }
        }
        double delta = (sum.eval(pt) + 1.0) / std::pow(nrm, (deg + 2) / 2);
        Polynomial spoiled =
            sum - poly_norm_sq(n).pow((deg + 2) / 2).scaled(rat_from_double(delta));

        SdpProblem bad = assemble_sdp(sos_feasibility_program(spoiled), Rational(0));
        SdpSolution bsol = solve_sdp(bad);
        if (bsol.status != SdpStatus::Feasible) {
            ++indef_ok;
        } else if (c.ok) {
            c.fail("spoiled poly #" + std::to_string(round) + " was accepted as feasible");
        }
    }

    if (feas_ok != 100) c.fail(std::to_string(feas_ok) + "/100 square sums verified");
    if (indef_ok != 100) c.fail(std::to_string(indef_ok) + "/100 spoiled polys rejected");
    if (c.ok)
        c.detail = "100/100 feasible verified, 100/100 indefinite rejected, worst eig " +
                   fmt(worst_eig) + ", worst resid " + fmt(worst_resid);
    return c;
}

// ---------------------------------------------------------------- criterion 5

struct RandomSystem {
    std::vector<SignedPowerExpr> f;
    std::vector<int> q;
    int p;
};

// exponents are multiples of 1/q_j per variable, so the composition clears
RandomSystem random_system(Rng& rng) {
    RandomSystem sys;
    int n = rng.uniform_int(1, 2);
    sys.q.resize(n);
    for (int& qi : sys.q) qi = rng.uniform_int(1, 3);
    sys.p = n == 1 ? rng.uniform_int(1, 3) : 2;
    for (int i = 0; i < n; ++i) {
        SignedPowerExpr e(n);
        int terms = rng.uniform_int(1, 2);
        for (int t = 0; t < terms; ++t) {
            std::vector<uint8_t> sigma(n);
            std::vector<Rational> exps(n);
            for (int j = 0; j < n; ++j) {
                sigma[j] = static_cast<uint8_t>(rng.uniform_int(0, 1));
                exps[j] = Rational(rng.uniform_int(0, 3), sys.q[j]);
            }
            int num = rng.uniform_int(-4, 4);
            if (num == 0) num = -1;
            e = spe_add(e, SignedPowerExpr::make_term(n, Rational(num, 2), sigma, exps));
        }
        sys.f.push_back(e);
    }
    return sys;
}

bool check_roundtrip(const std::vector<SignedPowerExpr>& f, const std::vector<int>& q,
                     Rng& rng, double tol, std::string& why) {
    int n = static_cast<int>(q.size());
    for (const auto& e : f) {
        SignedPowerExpr back = spe_substitute_power(spe_substitute_power(e, q, true), q, false);
        for (int pt = 0; pt < 25; ++pt) {
            std::vector<double> z(n);
            for (int i = 0; i < n; ++i) z[i] = rng.uniform(-2.0, 2.0);
            double a = spe_eval(e, z), b = spe_eval(back, z);
            if (std::fabs(a - b) > tol * (1.0 + std::fabs(a))) {
                why = "round-trip drift " + fmt(std::fabs(a - b));
                return false;
            }
        }
    }
    return true;
}

bool check_sectors(const TransformResult& tr, Rng& rng, double tol, std::string& why) {
    int n = static_cast<int>(tr.q.size());
    for (const auto& sec : tr.sectors) {
        for (int pt = 0; pt < 100; ++pt) {
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i) {
                x[i] = rng.uniform(0.01, 1.8);
                if (sec.signs[i] < 0)
                    x[i] = -x[i];
                else if (sec.signs[i] == 0 && rng.uniform() < 0.5)
                    x[i] = -x[i];
            }
            for (int i = 0; i < n; ++i) {
                double a = sec.field[i].eval(x), b = spe_eval(tr.composed[i], x);
                if (std::fabs(a - b) > tol * (1.0 + std::fabs(b))) {
                    why = "sector field drift " + fmt(std::fabs(a - b));
                    return false;
                }
            }
            double a = sec.norm_poly.eval(x), b = spe_eval(tr.norm_spe, x);
            if (std::fabs(a - b) > tol * (1.0 + std::fabs(b))) {
                why = "sector norm drift " + fmt(std::fabs(a - b));
                return false;
            }
        }
    }
    return true;
}

Criterion criterion5() {
    Criterion c;
    Rng rng(515151);
    std::string why;

    auto ex1 = parse_expression("-sign(x)*abs(x)^(2/3)", {"x"});
    std::vector<SignedPowerExpr> f1 = {ex1};
    std::vector<SignedPowerExpr> f2 = {
        parse_expression("-sign(x1)*abs(x1)^(1/2) + x2^(1/3)", {"x1", "x2"}),
        parse_expression("-x2^(1/3)", {"x1", "x2"})};

    if (!check_roundtrip(f1, {3}, rng, 1e-12, why)) c.fail("example 1: " + why);
    if (!check_roundtrip(f2, {2, 3}, rng, 1e-12, why)) c.fail("example 2: " + why);
    if (!check_sectors(compose_and_clear(f1, {3}, std::vector<int>{1}, 3), rng, 1e-10, why))
        c.fail("example 1 sectors: " + why);
    if (!check_sectors(compose_and_clear(f2, {2, 3}, std::vector<int>{2, 2}, 4), rng, 1e-10,
                       why))
        c.fail("example 2 sectors: " + why);

    int done = 0;
    for (int round = 0; round < 20; ++round) {
        RandomSystem sys = random_system(rng);
        if (!check_roundtrip(sys.f, sys.q, rng, 1e-12, why)) {
            c.fail("random system #" + std::to_string(round) + ": " + why);
            continue;
        }
        TransformResult tr;
        try {
            tr = compose_and_clear(sys.f, sys.q, std::nullopt, sys.p);
        } catch (const TransformError& e) {
            c.fail("random system #" + std::to_string(round) + " failed to clear: " + e.what());
            continue;
        }
        if (!check_sectors(tr, rng, 1e-10, why)) {
            c.fail("random system #" + std::to_string(round) + " sectors: " + why);
            continue;
        }
        ++done;
    }
    if (c.ok)
        c.detail = "2 examples + " + std::to_string(done) +
                   " random systems round-trip at 1e-12, sectors match at 1e-10";
    return c;
}

// ---------------------------------------------------------------- criterion 6

Criterion grid_check(const char* problem, const char* cert_file, Criterion c) {
    CliResult val = run_cli("validate " + problem_path(problem) + " " + cert_file + " --grid 5");
    json rep = last_report(val.out);
    if (rep.is_discarded() || !rep.contains("data")) {
        c.fail(std::string(problem) + ": validate produced no report (exit " +
               std::to_string(val.exit_code) + ")");
        return c;
    }
    const json& rows = rep["data"]["rows"];
    if (rows.empty()) {
        c.fail(std::string(problem) + ": empty grid");
        return c;
    }
    int points = 0, unsound = 0;
    for (const auto& row : rows) {
        ++points;
        if (row["simulated"].is_null()) {
            ++unsound;
            continue;
        }
        double sim = row["simulated"].get<double>();
        double bound = row["bound"].get<double>();
        if (sim > bound * 1.01) ++unsound;
    }
    if (unsound > 0)
        c.fail(std::string(problem) + ": " + std::to_string(unsound) + "/" +
               std::to_string(points) + " grid points exceed the bound");
    else
        c.note(std::string(problem) + ": " + std::to_string(points) + " points sound");
    return c;
}

Criterion criterion6() {
    Criterion c;
    std::ifstream c1("acc_ex1.cert.json"), c2("acc_ex2.cert.json");
    if (!c1.good() || !c2.good()) {
        c.fail("certificates from criteria 1 and 2 unavailable");
        return c;
    }
    c = grid_check("ex1.toml", "acc_ex1.cert.json", std::move(c));
    c = grid_check("ex2.toml", "acc_ex2.cert.json", std::move(c));
    return c;
}

// ---------------------------------------------------------------- criterion 7

Certificate forged_certificate() {
    Certificate cert;
    cert.origin = "forged";
    cert.states = {"x"};
    cert.q = {1};
    cert.lambda = {0};
    cert.p = 1;
    cert.d = 1;
    cert.tau = 1;
    cert.deg_v = 2;
    cert.k = Rational(1);
    cert.epsilon = Rational(1, 10000);
    cert.mu = Rational(1);
    cert.mu_tilde = Rational(1);
    cert.gamma = Rational(1, 2);
    cert.v = parse_polynomial("x^2", {"x"});
    cert.v_tilde = spe_substitute_power(SignedPowerExpr::from_poly(cert.v), cert.q, false);
    cert.omega_ineqs = {parse_polynomial("1 - x^2", {"x"})};
    cert.f = {parse_expression("-x", {"x"})};
    return cert;
}

Criterion criterion7() {
    Criterion c;
    for (const char* file : {"acc_ex1.cert.json", "acc_ex2.cert.json"}) {
        Certificate cert;
        try {
            cert = load_certificate(file);
        } catch (const std::exception& e) {
            c.fail(std::string(file) + " unavailable: " + e.what());
            continue;
        }
        NumericCheck chk = check_lyapunov_numeric(cert, 500);
        if (!chk.ok)
            c.fail(std::string(file) + ": " + chk.detail);
        else
            c.note(std::string(file) + ": worst margin " + fmt(chk.worst_margin));
    }

    NumericCheck forged = check_lyapunov_numeric(forged_certificate(), 500);
    if (forged.ok)
        c.fail("forged certificate was not flagged");
    else
        c.note("forged certificate flagged (" + std::to_string(forged.violations) +
               " violations)");
    return c;
}

// ---------------------------------------------------------------- criterion 8

Criterion criterion8() {
    Criterion c;
    CliResult again = run_cli("certify " + problem_path("ex2.toml") +
                              " --out acc_ex2_repeat.cert.json");
    if (again.exit_code != 0) {
        c.fail("second certify run exited " + std::to_string(again.exit_code));
        return c;
    }
    std::string a = slurp("acc_ex2.cert.json");
    std::string b = slurp("acc_ex2_repeat.cert.json");
    if (a.empty() || b.empty()) {
        c.fail("certificate files unreadable");
    } else if (a != b) {
        c.fail("certificates differ between runs (" + std::to_string(a.size()) + " vs " +
               std::to_string(b.size()) + " bytes)");
    } else {
        c.detail = "two runs produced byte-identical certificates (" +
                   std::to_string(a.size()) + " bytes)";
    }
    return c;
}

}  // namespace

int main() {
    struct Entry {
        int index;
        Criterion (*fn)();
    };
    const Entry entries[] = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
        {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
    };

    int failures = 0;
    for (const auto& e : entries) {
        Criterion c;
        try {
            c = e.fn();
        } catch (const std::exception& ex) {
            c.ok = false;
            c.detail = std::string("unhandled error: ") + ex.what();
        }
        if (!c.ok) ++failures;
        std::printf("%s criterion %d: %s\n", c.ok ? "PASS" : "FAIL", e.index,
                    c.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
