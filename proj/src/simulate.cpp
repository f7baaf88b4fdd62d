#include "ftscert/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace ftscert {

namespace {

double nrm2(const std::vector<double>& z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return std::sqrt(s);
}

// cubic Hermite on [0, 1] with step h: endpoints y0, y1 and slopes k0, k1
void hermite(double th, double h, const std::vector<double>& y0, const std::vector<double>& k0,
             const std::vector<double>& y1, const std::vector<double>& k1,
             std::vector<double>& out) {
    double t2 = th * th, t3 = t2 * th;
    double h00 = 2 * t3 - 3 * t2 + 1;
    double h10 = t3 - 2 * t2 + th;
    double h01 = -2 * t3 + 3 * t2;
    double h11 = t3 - t2;
    for (size_t i = 0; i < y0.size(); ++i)
        out[i] = h00 * y0[i] + h10 * h * k0[i] + h01 * y1[i] + h11 * h * k1[i];
}

}  // namespace

SimResult simulate(const std::vector<SignedPowerExpr>& f, const std::vector<double>& z0,
                   const SimOptions& opts) {
    if (z0.size() != f.size())
        throw CertifyError("initial point dimension does not match the system");
    int n = static_cast<int>(z0.size());
    SimResult res;

    auto field = [&](const std::vector<double>& z, std::vector<double>& out) {
        for (int i = 0; i < n; ++i) out[i] = spe_eval(f[i], z);
    };

    std::vector<double> z = z0, znew(n), k1(n), k2(n), k3(n), k4(n), stage(n), err(n);
    double t = 0.0;
    res.samples.push_back({t, z});

    if (nrm2(z) <= opts.threshold) {
        res.terminated_by = "settled";
        res.settled = true;
        res.t_settle = 0.0;
        res.t_end = 0.0;
        return res;
    }

    field(z, k1);
    double fn = nrm2(k1);
    double h = 1e-3 * (1.0 + nrm2(z)) / (1.0 + fn);
    h = std::min(h, opts.horizon);
    const double hmin = 1e-12;

    while (res.steps < opts.max_steps && t < opts.horizon) {
        if (t + h > opts.horizon) h = opts.horizon - t;

        // Bogacki-Shampine 3(2), first-same-as-last
        for (int i = 0; i < n; ++i) stage[i] = z[i] + 0.5 * h * k1[i];
        field(stage, k2);
        for (int i = 0; i < n; ++i) stage[i] = z[i] + 0.75 * h * k2[i];
        field(stage, k3);
        for (int i = 0; i < n; ++i)
            znew[i] = z[i] + h * (2.0 / 9.0 * k1[i] + 1.0 / 3.0 * k2[i] + 4.0 / 9.0 * k3[i]);
        field(znew, k4);
        for (int i = 0; i < n; ++i)
            err[i] = h * (-5.0 / 72.0 * k1[i] + 1.0 / 12.0 * k2[i] + 1.0 / 9.0 * k3[i] -
                          1.0 / 8.0 * k4[i]);

        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            double sc = opts.atol + opts.rtol * std::max(std::fabs(z[i]), std::fabs(znew[i]));
            double r = err[i] / sc;
            e += r * r;
        }
        e = std::sqrt(e / n);

        bool accept = e <= 1.0 || h <= hmin;
        if (accept) {
            ++res.steps;
            double norm_new = nrm2(znew);

            if (norm_new <= opts.threshold) {
                // refine the crossing on the dense output
                double lo = 0.0, hi = 1.0;
                std::vector<double> mid(n);
                for (int it = 0; it < 60; ++it) {
                    double th = 0.5 * (lo + hi);
                    hermite(th, h, z, k1, znew, k4, mid);
                    (nrm2(mid) > opts.threshold ? lo : hi) = th;
                    if ((hi - lo) * h <= 1e-9 * (1.0 + t)) break;
                }
                double tc = t + hi * h;
                hermite(hi, h, z, k1, znew, k4, mid);
                res.samples.push_back({tc, mid});
                res.terminated_by = "settled";
                res.settled = true;
                res.t_settle = tc;
                res.t_end = tc;
                return res;
            }

            t += h;
            z = znew;
            k1 = k4;  // FSAL
            res.samples.push_back({t, z});

            if (norm_new >= opts.blowup) {
                res.terminated_by = "blowup";
                res.t_end = t;
                return res;
            }
        }

        double factor = e > 0.0 ? 0.9 * std::pow(e, -1.0 / 3.0) : 5.0;
        factor = std::min(5.0, std::max(0.2, factor));
        h = std::max(h * factor, hmin);
    }

    res.terminated_by = "horizon";
    res.t_end = t;
    return res;
}

std::optional<double> estimate_settling(const std::vector<SignedPowerExpr>& f,
                                        const std::vector<double>& z0, double threshold) {
    SimOptions opts;
    opts.threshold = threshold;
    SimResult res = simulate(f, z0, opts);
    if (!res.settled) return std::nullopt;
    return res.t_settle;
}

BoundValidation validate_bound(const Certificate& cert, const std::vector<double>& z0,
                               const SimOptions& opts) {
    BoundValidation rep;
    rep.vt0 = spe_eval(cert.v_tilde, z0);
    rep.bound = settling_bound(cert, z0);
    rep.in_region = rep.vt0 <= 0.0 || sublevel_validate(cert, rep.vt0).ok;

    SimResult res = simulate(cert.f, z0, opts);
    rep.terminated_by = res.terminated_by;
    if (res.settled) rep.simulated = res.t_settle;
    rep.sound = !rep.simulated || *rep.simulated <= rep.bound;
    return rep;
}

void write_trajectory_csv(const SimResult& res, const std::vector<std::string>& states,
                          const Certificate* cert, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CertifyError("cannot write trajectory file: " + path);
    out << "t";
    for (const auto& s : states) out << "," << s;
    out << ",norm,vtilde\n";
    char buf[64];
    auto put = [&](double v, bool lead_comma) {
        std::snprintf(buf, sizeof buf, "%.15g", v);
        if (lead_comma) out << ",";
        out << buf;
    };
    for (const auto& pt : res.samples) {
        put(pt.t, false);
        for (double v : pt.z) put(v, true);
        put(nrm2(pt.z), true);
        put(cert ? spe_eval(cert->v_tilde, pt.z) : 0.0, true);
        out << "\n";
    }
}

}  // namespace ftscert
