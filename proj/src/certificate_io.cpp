#include "ftscert/certificate_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ftscert/parse.hpp"
#include "json.hpp"

namespace ftscert {

namespace {

using json = nlohmann::ordered_json;

json poly_terms(const Polynomial& p) {
    json out = json::array();
    for (const auto& [e, c] : p.terms()) {
        json t = json::array();
        t.push_back(e);
        t.push_back(c.get_num().get_str());
        t.push_back(c.get_den().get_str());
        out.push_back(t);
    }
    return out;
}

Polynomial poly_from_terms(const json& terms, int n) {
    Polynomial p(n);
    for (const auto& t : terms) {
        ExpVec e = t.at(0).get<ExpVec>();
        if (static_cast<int>(e.size()) != n)
            throw CertifyError("certificate: exponent vector arity mismatch");
        p.add_term(e, rat_from_string(t.at(1).get<std::string>() + "/" +
                                      t.at(2).get<std::string>()));
    }
    return p;
}

// %.17g round-trips IEEE doubles exactly and prints deterministically
std::string dstr(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double dparse(const json& v) { return std::strtod(v.get<std::string>().c_str(), nullptr); }

}  // namespace

std::string certificate_to_json(const Certificate& cert) {
    json j;
    j["format"] = "ftscert-certificate/1";
    j["V"] = poly_terms(cert.v);
    json mults = json::object();
    for (const auto& [id, poly] : cert.multipliers) mults[id] = poly_terms(poly);
    j["multipliers"] = mults;
    j["q"] = cert.q;
    j["lambda"] = cert.lambda;
    j["p"] = cert.p;
    j["d"] = cert.d;
    j["tau"] = cert.tau;
    j["k"] = rat_to_decimal(cert.k);
    j["mu"] = rat_to_decimal(cert.mu);
    j["epsilon"] = rat_to_decimal(cert.epsilon);
    json omega = json::array();
    for (const auto& g : cert.omega_ineqs) omega.push_back(poly_terms(g));
    j["omega_ineqs"] = omega;
    j["gamma"] = rat_to_decimal(cert.gamma);
    j["mu_tilde"] = rat_to_decimal(cert.mu_tilde);
    j["V_tilde"] = print_expression(cert.v_tilde, cert.states);
    if (cert.has_c_star) j["c_star"] = cert.c_star_unbounded ? "inf" : dstr(cert.c_star);

    json grams = json::array();
    for (const auto& gb : cert.grams) {
        json b;
        b["id"] = gb.id;
        b["basis"] = gb.basis;
        json entries = json::array();
        for (double v : gb.q) entries.push_back(dstr(v));
        b["q"] = entries;
        grams.push_back(b);
    }
    j["grams"] = grams;

    json prov;
    prov["tool"] = "ftscert 0.1.0";
    prov["origin"] = cert.origin;
    prov["states"] = cert.states;
    json fexprs = json::array();
    for (const auto& fi : cert.f) fexprs.push_back(print_expression(fi, cert.states));
    prov["f"] = fexprs;
    prov["deg_v"] = cert.deg_v;
    json tols;
    tols["feas_tol"] = dstr(cert.feas_tol);
    tols["eig_tol"] = dstr(1e-7);
    tols["bisection_tol_scale"] = dstr(1e-2);
    prov["tolerances"] = tols;
    json solver;
    solver["probes"] = cert.probes;
    solver["iterations"] = cert.iterations;
    solver["residual"] = dstr(cert.residual);
    solver["log"] = cert.probe_log;
    prov["solver"] = solver;
    j["provenance"] = prov;

    return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw CertifyError(std::string("certificate: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "ftscert-certificate/1")
            throw CertifyError("certificate: unsupported format tag");

        Certificate cert;
        cert.q = j.at("q").get<std::vector<int>>();
        cert.lambda = j.at("lambda").get<std::vector<int>>();
        int n = static_cast<int>(cert.q.size());
        if (n == 0 || cert.lambda.size() != cert.q.size())
            throw CertifyError("certificate: q/lambda lengths are inconsistent");
        cert.p = j.at("p").get<int>();
        cert.d = j.at("d").get<int>();
        cert.tau = j.at("tau").get<int>();
        cert.k = rat_from_string(j.at("k").get<std::string>());
        cert.mu = rat_from_string(j.at("mu").get<std::string>());
        cert.epsilon = rat_from_string(j.at("epsilon").get<std::string>());
        cert.gamma = rat_from_string(j.at("gamma").get<std::string>());
        cert.mu_tilde = rat_from_string(j.at("mu_tilde").get<std::string>());

        cert.v = poly_from_terms(j.at("V"), n);
        cert.v_tilde = spe_substitute_power(SignedPowerExpr::from_poly(cert.v), cert.q, false);
        for (const auto& [id, terms] : j.at("multipliers").items())
            cert.multipliers.emplace_back(id, poly_from_terms(terms, n));
        for (const auto& terms : j.at("omega_ineqs"))
            cert.omega_ineqs.push_back(poly_from_terms(terms, n));

        if (j.contains("c_star")) {
            cert.has_c_star = true;
            const json& cs = j.at("c_star");
            if (cs.get<std::string>() == "inf")
                cert.c_star_unbounded = true;
            else
                cert.c_star = dparse(cs);
        }

        for (const auto& b : j.at("grams")) {
            GramBlock gb;
            gb.id = b.at("id").get<std::string>();
            gb.basis = b.at("basis").get<std::vector<ExpVec>>();
            for (const auto& v : b.at("q")) gb.q.push_back(dparse(v));
            if (gb.q.size() != gb.basis.size() * gb.basis.size())
                throw CertifyError("certificate: gram block " + gb.id + " has wrong size");
            for (const auto& e : gb.basis)
                if (static_cast<int>(e.size()) != n)
                    throw CertifyError("certificate: gram basis arity mismatch in " + gb.id);
            cert.grams.push_back(std::move(gb));
        }

        const json& prov = j.at("provenance");
        cert.origin = prov.at("origin").get<std::string>();
        cert.states = prov.at("states").get<std::vector<std::string>>();
        if (cert.states.size() != static_cast<size_t>(n))
            throw CertifyError("certificate: states length does not match q");
        for (const auto& fs : prov.at("f"))
            cert.f.push_back(parse_expression(fs.get<std::string>(), cert.states));
        cert.deg_v = prov.at("deg_v").get<int>();
        cert.feas_tol = dparse(prov.at("tolerances").at("feas_tol"));
        const json& solver = prov.at("solver");
        cert.probes = solver.at("probes").get<int>();
        cert.iterations = solver.at("iterations").get<int>();
        cert.residual = dparse(solver.at("residual"));
        cert.probe_log = solver.at("log").get<std::vector<std::string>>();
        return cert;
    } catch (const CertifyError&) {
        throw;
    } catch (const std::exception& e) {
        throw CertifyError(std::string("certificate: malformed field: ") + e.what());
    }
}

void save_certificate(const Certificate& cert, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CertifyError("cannot write certificate file: " + path);
    out << certificate_to_json(cert);
}

Certificate load_certificate(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CertifyError("cannot read certificate file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return certificate_from_json(ss.str());
}

}  // namespace ftscert
