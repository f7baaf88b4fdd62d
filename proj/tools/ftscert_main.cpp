#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ftscert/certificate_io.hpp"
#include "ftscert/certify.hpp"
#include "ftscert/problem.hpp"
#include "ftscert/simulate.hpp"
#include "ftscert/util.hpp"
#include "json.hpp"

namespace {

using ftscert::Certificate;
using ftscert::ProblemSpec;
using json = nlohmann::ordered_json;

struct StageClock {
    using clock = std::chrono::steady_clock;
    clock::time_point start = clock::now();
    clock::time_point last = start;
    json ms = json::object();

    void mark(const std::string& stage) {
        auto now = clock::now();
        ms[stage] = std::chrono::duration<double, std::milli>(now - last).count();
        last = now;
    }
    json finish() {
        ms["total"] = std::chrono::duration<double, std::milli>(clock::now() - start).count();
        return ms;
    }
};

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "unreadable";
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[24];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                  static_cast<unsigned long long>(ftscert::fnv1a64(ss.str())));
    return buf;
}

std::string join_argv(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

// one machine-readable report line, always the last thing on stdout
void emit_report(const std::string& command, const std::string& argv_echo,
                 const std::string& digest, const std::string& outcome,
                 const json& certificate, const json& failure, json timings,
                 const json& solver, const json& data) {
    json r;
    r["command"] = command;
    r["argv"] = argv_echo;
    r["inputs_digest"] = digest;
    r["outcome"] = outcome;
    r["certificate"] = certificate;
    r["failure"] = failure;
    r["timings_ms"] = std::move(timings);
    r["solver"] = solver;
    r["data"] = data;
    std::cout << r.dump() << "\n";
}

std::vector<double> parse_csv_doubles(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": bad number '" + tok + "'");
        }
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size())
            throw std::invalid_argument(std::string(what) + ": bad number '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return out;
}

std::vector<int> parse_csv_ints(const std::string& text, const char* what) {
    std::vector<int> out;
    for (double v : parse_csv_doubles(text, what)) {
        int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw std::invalid_argument(std::string(what) + ": expected integers");
        out.push_back(i);
    }
    return out;
}

json solver_json(const Certificate& cert) {
    json s;
    s["probes"] = cert.probes;
    s["iterations"] = cert.iterations;
    s["residual"] = cert.residual;
    s["mu"] = ftscert::rat_to_double(cert.mu);
    return s;
}

struct CertifyArgs {
    std::string problem;
    std::string k;
    std::vector<double> mu_bracket;
    int deg_v = 0;
    int deg_mult = -1;
    std::string q, lambda;
    std::string out;
    double tol = 1e-8;
};

int cmd_certify(const CertifyArgs& a, const std::string& argv_echo) {
    StageClock clk;
    std::string digest = file_digest(a.problem);
    ProblemSpec prob;
    try {
        prob = ftscert::load_problem(a.problem);
        if (!a.k.empty()) {
            prob.k = ftscert::rat_from_string(a.k);
            if (prob.k <= 0) throw std::invalid_argument("--k must be positive");
        }
        if (!a.mu_bracket.empty()) {
            prob.mu_lo = a.mu_bracket[0];
            prob.mu_hi = a.mu_bracket[1];
        }
        if (a.deg_v) {
            if (a.deg_v < 2 || a.deg_v % 2)
                throw std::invalid_argument("--deg-v must be a positive even integer");
            prob.deg_v = a.deg_v;
        }
        if (a.deg_mult >= 0) prob.deg_mult = a.deg_mult;
        if (!a.q.empty()) {
            auto qs = parse_csv_ints(a.q, "--q");
            if (qs.size() != prob.states.size())
                throw std::invalid_argument("--q needs one entry per state");
            prob.q = qs;
        }
        if (!a.lambda.empty()) {
            auto ls = parse_csv_ints(a.lambda, "--lambda");
            if (ls.size() != prob.states.size())
                throw std::invalid_argument("--lambda needs one entry per state");
            prob.lambda = ls;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    clk.mark("load");

    std::string out_path = a.out;
    if (out_path.empty()) {
        out_path = a.problem;
        size_t dot = out_path.find_last_of('.');
        size_t slash = out_path.find_last_of('/');
        if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
            out_path.resize(dot);
        out_path += ".cert.json";
    }

    ftscert::CertifyOutcome res;
    try {
        res = ftscert::certify(prob, a.tol, false);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    clk.mark("solve");

    if (!res.certified) {
        std::cout << res.reason << "\n";
        json solver;
        solver["probes"] = static_cast<int>(res.probe_log.size());
        emit_report("certify", argv_echo, digest, "not-certified", nullptr, res.reason,
                    clk.finish(), solver, json::object());
        return 2;
    }

    Certificate& cert = *res.cert;
    cert.has_c_star = true;
    if (cert.omega_ineqs.empty())
        cert.c_star_unbounded = true;
    else
        cert.c_star = ftscert::max_valid_level(cert);
    clk.mark("sublevel");

    try {
        ftscert::save_certificate(cert, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    clk.mark("write");

    char line[256];
    std::snprintf(line, sizeof line, "certified: mu = %.6g, mu_tilde = %.6g, gamma = %.6g",
                  ftscert::rat_to_double(cert.mu), ftscert::rat_to_double(cert.mu_tilde),
                  ftscert::rat_to_double(cert.gamma));
    std::cout << line << "\n";
    std::cout << "V = " << ftscert::print_polynomial(cert.v, cert.states) << "\n";
    if (cert.c_star_unbounded)
        std::cout << "c* = inf\n";
    else
        std::cout << "c* = " << cert.c_star << "\n";
    std::cout << "certificate written to " << out_path << "\n";

    json data;
    data["mu"] = ftscert::rat_to_double(cert.mu);
    data["mu_tilde"] = ftscert::rat_to_double(cert.mu_tilde);
    data["gamma"] = ftscert::rat_to_decimal(cert.gamma);
    data["c_star"] = cert.c_star_unbounded ? json("inf") : json(cert.c_star);
    emit_report("certify", argv_echo, digest, "certified", out_path, nullptr, clk.finish(),
                solver_json(cert), data);
    return 0;
}

int cmd_bound(const std::string& cert_path, const std::string& z0_text,
              const std::string& argv_echo) {
    StageClock clk;
    Certificate cert;
    std::vector<double> z0;
    try {
        cert = ftscert::load_certificate(cert_path);
        z0 = parse_csv_doubles(z0_text, "--z0");
        if (z0.size() != cert.states.size())
            throw std::invalid_argument("--z0 needs one entry per state");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    clk.mark("load");

    double vt0 = ftscert::spe_eval(cert.v_tilde, z0);
    double bound = 0.0;
    try {
        bound = ftscert::settling_bound(cert, z0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const char* region = "unknown";
    if (cert.has_c_star)
        region = (cert.c_star_unbounded || vt0 <= cert.c_star) ? "yes" : "no";
    clk.mark("evaluate");

    char line[128];
    std::snprintf(line, sizeof line, "bound = %.4g, in validated region: %s", bound, region);
    std::cout << line << "\n";

    json data;
    data["bound"] = bound;
    data["vt0"] = vt0;
    data["in_region"] = std::string(region);
    emit_report("bound", argv_echo, file_digest(cert_path), "ok", cert_path, nullptr,
                clk.finish(), nullptr, data);
    return 0;
}

int cmd_simulate(const std::string& problem, const std::string& z0_text, double threshold,
                 double horizon, const std::string& csv, const std::string& argv_echo) {
    StageClock clk;
    ProblemSpec prob;
    std::vector<double> z0;
    try {
        prob = ftscert::load_problem(problem);
        z0 = parse_csv_doubles(z0_text, "--z0");
        if (z0.size() != prob.states.size())
            throw std::invalid_argument("--z0 needs one entry per state");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    clk.mark("load");

    ftscert::SimOptions opts;
    opts.threshold = threshold;
    opts.horizon = horizon;
    ftscert::SimResult res = ftscert::simulate(prob.f, z0, opts);
    clk.mark("integrate");

    if (res.settled) {
        char line[128];
        std::snprintf(line, sizeof line, "settled at t = %.6g (%ld steps)", res.t_settle,
                      res.steps);
        std::cout << line << "\n";
    } else {
        char line[128];
        std::snprintf(line, sizeof line, "no settling before t = %.6g (%s)", res.t_end,
                      res.terminated_by.c_str());
        std::cout << line << "\n";
    }
    if (!csv.empty()) {
        try {
            ftscert::write_trajectory_csv(res, prob.states, nullptr, csv);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        std::cout << "trajectory written to " << csv << "\n";
    }

    json data;
    data["terminated_by"] = res.terminated_by;
    data["settled"] = res.settled;
    data["t_settle"] = res.settled ? json(res.t_settle) : json(nullptr);
    data["t_end"] = res.t_end;
    data["steps"] = res.steps;
    emit_report("simulate", argv_echo, file_digest(problem), res.terminated_by, nullptr,
                nullptr, clk.finish(), nullptr, data);
    return 0;
}

int cmd_validate(const std::string& problem, const std::string& cert_path,
                 const std::string& z0_text, int grid, double threshold, double horizon,
                 const std::string& argv_echo) {
    StageClock clk;
    ProblemSpec prob;
    Certificate cert;
    try {
        prob = ftscert::load_problem(problem);
        cert = ftscert::load_certificate(cert_path);
        if (prob.states != cert.states)
            throw std::invalid_argument("certificate was issued for different states");
        cert.f = prob.f;  // the problem file is the authority on the dynamics
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    clk.mark("load");

    ftscert::SimOptions opts;
    opts.threshold = threshold;
    opts.horizon = horizon;

    struct Row {
        std::vector<double> z0;
        ftscert::BoundValidation rep;
    };
    std::vector<Row> rows;

    try {
        if (!z0_text.empty()) {
            auto z0 = parse_csv_doubles(z0_text, "--z0");
            if (z0.size() != prob.states.size())
                throw std::invalid_argument("--z0 needs one entry per state");
            rows.push_back({z0, ftscert::validate_bound(cert, z0, opts)});
        } else {
            if (!cert.has_c_star || cert.c_star_unbounded)
                throw std::invalid_argument(
                    "grid mode needs a certificate with a finite validated sublevel");
            int n = static_cast<int>(prob.states.size());
            double r = ftscert::domain_enclosing_radius(cert.omega_ineqs, n);
            std::vector<double> half(n);
            for (int i = 0; i < n; ++i) half[i] = std::pow(r, cert.q[i]);
            std::vector<int> idx(n, 0);
            while (true) {
                std::vector<double> z(n);
                for (int i = 0; i < n; ++i)
                    z[i] = grid == 1 ? 0.0 : -half[i] + 2.0 * half[i] * idx[i] / (grid - 1);
                double vt = ftscert::spe_eval(cert.v_tilde, z);
                if (vt <= cert.c_star) {
                    Row row;
                    row.z0 = z;
                    row.rep.vt0 = vt;
                    row.rep.bound = ftscert::settling_bound(cert, z);
                    row.rep.in_region = true;  // vt <= c* is already proven
                    ftscert::SimResult sim = ftscert::simulate(cert.f, z, opts);
                    row.rep.terminated_by = sim.terminated_by;
                    if (sim.settled) row.rep.simulated = sim.t_settle;
                    row.rep.sound = !row.rep.simulated || *row.rep.simulated <= row.rep.bound;
                    rows.push_back(std::move(row));
                }
                int a = 0;
                while (a < n && ++idx[a] == grid) idx[a++] = 0;
                if (a == n) break;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    clk.mark("validate");

    std::cout << "z0 | bound | simulated | in region | sound\n";
    bool all_ok = true;
    json jrows = json::array();
    for (const auto& row : rows) {
        std::string zs;
        for (size_t i = 0; i < row.z0.size(); ++i) {
            char b[32];
            std::snprintf(b, sizeof b, "%.6g", row.z0[i]);
            if (i) zs += ",";
            zs += b;
        }
        char sim[32];
        if (row.rep.simulated)
            std::snprintf(sim, sizeof sim, "%.6g", *row.rep.simulated);
        else
            std::snprintf(sim, sizeof sim, "%s", row.rep.terminated_by.c_str());
        char line[160];
        std::snprintf(line, sizeof line, "%s | %.6g | %s | %s | %s", zs.c_str(), row.rep.bound,
                      sim, row.rep.in_region ? "yes" : "no", row.rep.sound ? "yes" : "no");
        std::cout << line << "\n";
        if (row.rep.in_region && !row.rep.sound) all_ok = false;

        json jr;
        jr["z0"] = row.z0;
        jr["vt0"] = row.rep.vt0;
        jr["bound"] = row.rep.bound;
        jr["in_region"] = row.rep.in_region;
        jr["simulated"] = row.rep.simulated ? json(*row.rep.simulated) : json(nullptr);
        jr["sound"] = row.rep.sound;
        jrows.push_back(jr);
    }

    json data;
    data["rows"] = jrows;
    data["points"] = static_cast<int>(rows.size());
    emit_report("validate", argv_echo, file_digest(problem), all_ok ? "sound" : "unsound",
                cert_path, nullptr, clk.finish(), nullptr, data);
    return all_ok ? 0 : 2;
}

int cmd_sublevel(const std::string& cert_path, double tol, const std::string& argv_echo) {
    StageClock clk;
    Certificate cert;
    try {
        cert = ftscert::load_certificate(cert_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    clk.mark("load");

    double c = ftscert::max_valid_level(cert, tol);
    clk.mark("bisect");

    if (std::isinf(c)) {
        std::cout << "c* = inf\n";
    } else {
        if (c == 0.0) std::cerr << "warning: no sublevel value could be validated\n";
        char line[64];
        std::snprintf(line, sizeof line, "c* = %.6g", c);
        std::cout << line << "\n";
    }

    json data;
    data["c_star"] = std::isinf(c) ? json("inf") : json(c);
    emit_report("sublevel", argv_echo, file_digest(cert_path), "ok", cert_path, nullptr,
                clk.finish(), nullptr, data);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-time stability certification for non-Lipschitz systems"};
    app.require_subcommand(1);
    std::string argv_echo = join_argv(argc, argv);

    CertifyArgs ca;
    auto* certify = app.add_subcommand("certify", "prove finite-time stability and emit a certificate");
    certify->add_option("problem", ca.problem, "problem file (TOML)")
        ->required()
        ->check(CLI::ExistingFile);
    certify->add_option("--k", ca.k, "upper bound coefficient on V");
    certify->add_option("--mu-bracket", ca.mu_bracket, "bisection bracket for mu")
        ->expected(2);
    certify->add_option("--deg-v", ca.deg_v, "degree of the Lyapunov candidate");
    certify->add_option("--deg-mult", ca.deg_mult, "degree of the decrease multipliers");
    certify->add_option("--q", ca.q, "power denominators, comma separated");
    certify->add_option("--lambda", ca.lambda, "clearing exponents, comma separated");
    certify->add_option("--out", ca.out, "certificate output path");
    certify->add_option("--tol", ca.tol, "interior point feasibility tolerance");

    std::string b_cert, b_z0;
    auto* bound = app.add_subcommand("bound", "evaluate the settling-time bound at a point");
    bound->add_option("certificate", b_cert, "certificate file")->required()->check(CLI::ExistingFile);
    bound->add_option("--z0", b_z0, "initial point, comma separated")->required();

    std::string s_problem, s_z0, s_csv;
    double s_threshold = 1e-6, s_horizon = 100.0;
    auto* simulate = app.add_subcommand("simulate", "integrate the system and report settling");
    simulate->add_option("problem", s_problem, "problem file (TOML)")
        ->required()
        ->check(CLI::ExistingFile);
    simulate->add_option("--z0", s_z0, "initial point, comma separated")->required();
    simulate->add_option("--threshold", s_threshold, "settling norm threshold");
    simulate->add_option("--horizon", s_horizon, "integration horizon");
    simulate->add_option("--csv", s_csv, "trajectory CSV output path");

    std::string v_problem, v_cert, v_z0;
    int v_grid = 0;
    double v_threshold = 1e-6, v_horizon = 100.0;
    auto* validate = app.add_subcommand("validate", "check the bound against simulation");
    validate->add_option("problem", v_problem, "problem file (TOML)")
        ->required()
        ->check(CLI::ExistingFile);
    validate->add_option("certificate", v_cert, "certificate file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* vz = validate->add_option("--z0", v_z0, "initial point, comma separated");
    validate->add_option("--grid", v_grid, "sample an NxN..xN grid of the validated region")
        ->excludes(vz);
    validate->add_option("--threshold", v_threshold, "settling norm threshold");
    validate->add_option("--horizon", v_horizon, "integration horizon");

    std::string l_cert;
    double l_tol = 1e-4;
    auto* sublevel = app.add_subcommand("sublevel", "largest validated sublevel value");
    sublevel->add_option("certificate", l_cert, "certificate file")->required()->check(CLI::ExistingFile);
    sublevel->add_option("--tol", l_tol, "bisection tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (app.got_subcommand(certify)) return cmd_certify(ca, argv_echo);
    if (app.got_subcommand(bound)) return cmd_bound(b_cert, b_z0, argv_echo);
    if (app.got_subcommand(simulate))
        return cmd_simulate(s_problem, s_z0, s_threshold, s_horizon, s_csv, argv_echo);
    if (app.got_subcommand(validate)) {
        if (v_z0.empty() && v_grid <= 0) {
            std::cerr << "error: validate needs --z0 or --grid\n";
            return 1;
        }
        return cmd_validate(v_problem, v_cert, v_z0, v_grid, v_threshold, v_horizon, argv_echo);
    }
    if (app.got_subcommand(sublevel)) return cmd_sublevel(l_cert, l_tol, argv_echo);
    return 1;
}
