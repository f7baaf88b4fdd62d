#include "ftscert/sosprog.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ftscert/linalg.hpp"

namespace ftscert {

namespace {

int even_ceil(int d) { return d + (d & 1); }
int even_floor(int d) { return d - (d & 1); }

void enumerate_monos(int nvars, int maxdeg, int pos, ExpVec& cur, int used,
                     std::vector<ExpVec>& out) {
    if (pos == nvars) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e + used <= maxdeg; ++e) {
        cur[pos] = e;
        enumerate_monos(nvars, maxdeg, pos + 1, cur, used + e, out);
    }
    cur[pos] = 0;
}

Polynomial v_monomial_poly(int nvars, const ExpVec& m) {
    return Polynomial::monomial(nvars, m, Rational(1));
}

}  // namespace

std::vector<ExpVec> monomial_basis(int nvars, int maxdeg, int mindeg) {
    std::vector<ExpVec> all;
    ExpVec cur(nvars, 0);
    enumerate_monos(nvars, maxdeg, 0, cur, 0, all);
    std::vector<ExpVec> out;
    for (auto& e : all)
        if (expvec_degree(e) >= mindeg) out.push_back(e);
    std::stable_sort(out.begin(), out.end(), [](const ExpVec& a, const ExpVec& b) {
        int da = expvec_degree(a), db = expvec_degree(b);
        if (da != db) return da < db;
        return a < b;
    });
    return out;
}

SosConstraint build_positivity(int nvars, const std::vector<ExpVec>& v_monomials,
                               int tau, const Rational& epsilon) {
    if (tau < 1) throw SosError("positivity: tau must be >= 1");
    if (epsilon <= 0) throw SosError("positivity: epsilon must be positive");
    SosConstraint c;
    c.name = "positivity";
    int deg_v = 0;
    for (const auto& m : v_monomials) deg_v = std::max(deg_v, expvec_degree(m));
    c.declared_degree = even_ceil(std::max(deg_v, 2 * tau));
    c.fixed_base = poly_norm_sq(nvars).pow(tau).scaled(-epsilon);
    c.fixed_mu = Polynomial(nvars);
    for (const auto& m : v_monomials) c.v_coeff_polys.push_back(v_monomial_poly(nvars, m));
    c.slots.push_back(GramSlot{"positivity.main", Polynomial::constant(nvars, Rational(1)),
                               monomial_basis(nvars, c.declared_degree / 2)});
    return c;
}

SosConstraint build_upper_bound(int nvars, const std::vector<ExpVec>& v_monomials,
                                const std::vector<Polynomial>& g, int d,
                                const Rational& k) {
    if (d < 1) throw SosError("upper bound: d must be >= 1");
    if (k <= 0) throw SosError("upper bound: k must be positive");
    SosConstraint c;
    c.name = "upper";
    int deg_v = 0;
    for (const auto& m : v_monomials) deg_v = std::max(deg_v, expvec_degree(m));
    c.declared_degree = even_ceil(std::max(2 * d, deg_v));
    c.fixed_base = poly_norm_sq(nvars).pow(d).scaled(k);
    c.fixed_mu = Polynomial(nvars);
    for (const auto& m : v_monomials)
        c.v_coeff_polys.push_back(-v_monomial_poly(nvars, m));
    c.slots.push_back(GramSlot{"upper.main", Polynomial::constant(nvars, Rational(1)),
                               monomial_basis(nvars, c.declared_degree / 2)});
    for (size_t i = 0; i < g.size(); ++i) {
        int deg_s = even_floor(c.declared_degree - g[i].degree());
        if (deg_s < 0) continue;
        c.slots.push_back(GramSlot{"upper.s" + std::to_string(i), g[i],
                                   monomial_basis(nvars, deg_s / 2)});
    }
    return c;
}

SosConstraint build_decrease(int nvars, const std::vector<ExpVec>& v_monomials,
                             const SectorConstraint& sector, int sector_index,
                             const std::vector<Polynomial>& g,
                             std::optional<int> deg_mult) {
    SosConstraint c;
    c.name = "decrease.sector" + std::to_string(sector_index);
    c.fixed_base = Polynomial(nvars);
    c.fixed_mu = -sector.norm_poly;

    for (const auto& m : v_monomials) {
        Polynomial pm = v_monomial_poly(nvars, m);
        Polynomial sum(nvars);
        for (int j = 0; j < nvars; ++j) sum += pm.partial(j) * sector.field[j];
        c.v_coeff_polys.push_back(-sum);
    }

    int d0 = 2;
    for (const auto& pm : c.v_coeff_polys) d0 = std::max(d0, pm.degree());
    d0 = std::max(d0, sector.norm_poly.degree());
    d0 = even_ceil(d0);

    std::vector<int> t_degs, v_degs;
    int declared = d0;
    for (const auto& gi : g) {
        int deg = deg_mult ? *deg_mult : even_floor(d0 - gi.degree());
        t_degs.push_back(deg);
        if (deg >= 0) declared = std::max(declared, even_ceil(deg + gi.degree()));
    }
    for (const auto& ei : sector.extra_ineqs) {
        int deg = deg_mult ? *deg_mult : even_floor(d0 - ei.degree());
        v_degs.push_back(deg);
        if (deg >= 0) declared = std::max(declared, even_ceil(deg + ei.degree()));
    }
    c.declared_degree = declared;

    std::string prefix = "decrease.sector" + std::to_string(sector_index) + ".";
    c.slots.push_back(GramSlot{prefix + "main", Polynomial::constant(nvars, Rational(1)),
                               monomial_basis(nvars, declared / 2)});
    for (size_t i = 0; i < g.size(); ++i) {
        if (t_degs[i] < 0) continue;
        c.slots.push_back(
            GramSlot{prefix + "t" + std::to_string(i), g[i], monomial_basis(nvars, t_degs[i] / 2)});
    }
    for (size_t j = 0; j < sector.extra_ineqs.size(); ++j) {
        if (v_degs[j] < 0) continue;
        c.slots.push_back(GramSlot{prefix + "v" + std::to_string(j), sector.extra_ineqs[j],
                                   monomial_basis(nvars, v_degs[j] / 2)});
    }
    return c;
}

SosProgram build_sos_program(const TransformResult& tr, const std::vector<Polynomial>& g,
                             const SosBuildParams& params) {
    if (params.deg_v < 2 || params.deg_v % 2 != 0)
        throw SosError("deg_v must be a positive even integer");
    int n = static_cast<int>(tr.q.size());
    SosProgram prog;
    prog.nvars = n;
    prog.v_monomials = monomial_basis(n, params.deg_v, 1);
    prog.constraints.push_back(build_positivity(n, prog.v_monomials, params.tau, params.epsilon));
    prog.constraints.push_back(build_upper_bound(n, prog.v_monomials, g, params.d, params.k));
    for (size_t s = 0; s < tr.sectors.size(); ++s)
        prog.constraints.push_back(build_decrease(n, prog.v_monomials, tr.sectors[s],
                                                  static_cast<int>(s), g, params.deg_mult));
    return prog;
}

SosProgram sos_feasibility_program(const Polynomial& poly) {
    SosProgram prog;
    prog.nvars = poly.nvars();
    SosConstraint c;
    c.name = "sos";
    c.declared_degree = even_ceil(std::max(0, poly.degree()));
    c.fixed_base = poly;
    c.fixed_mu = Polynomial(poly.nvars());
    c.slots.push_back(GramSlot{"sos.main", Polynomial::constant(poly.nvars(), Rational(1)),
                               monomial_basis(poly.nvars(), c.declared_degree / 2)});
    prog.constraints.push_back(std::move(c));
    return prog;
}

SdpProblem assemble_sdp(const SosProgram& prog, const Rational& mu, bool prune) {
    SdpProblem sdp;
    sdp.n_free = static_cast<int>(prog.v_monomials.size());

    for (size_t ci = 0; ci < prog.constraints.size(); ++ci) {
        const SosConstraint& con = prog.constraints[ci];
        std::map<ExpVec, SdpRow> rows;
        auto row_for = [&](const ExpVec& m) -> SdpRow& {
            auto it = rows.find(m);
            if (it == rows.end()) {
                SdpRow r;
                r.constraint = static_cast<int>(ci);
                r.mono = m;
                r.rhs = Rational(0);
                it = rows.emplace(m, std::move(r)).first;
            }
            return it->second;
        };

        int first_block = static_cast<int>(sdp.blocks.size());
        for (size_t si = 0; si < con.slots.size(); ++si) {
            const GramSlot& slot = con.slots[si];
            sdp.blocks.push_back(SdpBlockInfo{slot.id, static_cast<int>(ci), slot.basis});
            int b = first_block + static_cast<int>(si);
            int dim = static_cast<int>(slot.basis.size());
            for (int iu = 0; iu < dim; ++iu) {
                for (int iv = iu; iv < dim; ++iv) {
                    ExpVec base(prog.nvars);
                    for (int k2 = 0; k2 < prog.nvars; ++k2)
                        base[k2] = slot.basis[iu][k2] + slot.basis[iv][k2];
                    Rational mult = iu == iv ? Rational(1) : Rational(2);
                    for (const auto& [ew, cw] : slot.weight.terms()) {
                        ExpVec m(prog.nvars);
                        for (int k2 = 0; k2 < prog.nvars; ++k2) m[k2] = base[k2] + ew[k2];
                        row_for(m).mat.push_back(SdpCoef{b, iu, iv, mult * cw});
                    }
                }
            }
        }

        for (size_t vm = 0; vm < con.v_coeff_polys.size(); ++vm)
            for (const auto& [e, co] : con.v_coeff_polys[vm].terms())
                row_for(e).free_vars.emplace_back(static_cast<int>(vm), -co);

        Polynomial fixed = con.fixed_base + con.fixed_mu.scaled(mu);
        for (const auto& [e, co] : fixed.terms()) row_for(e).rhs += co;

        for (auto& [m, r] : rows) {
            if (r.mat.empty() && r.free_vars.empty() && r.rhs == 0) continue;
            sdp.rows.push_back(std::move(r));
        }
    }

    if (!prune) return sdp;

    std::vector<std::vector<char>> alive;
    alive.reserve(sdp.blocks.size());
    for (const auto& b : sdp.blocks) alive.emplace_back(b.basis.size(), 1);
    std::vector<char> row_dead(sdp.rows.size(), 0);

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t ri = 0; ri < sdp.rows.size(); ++ri) {
            if (row_dead[ri]) continue;
            const SdpRow& r = sdp.rows[ri];
            bool all_diag = true;
            int sign = 0;
            bool mixed = false;
            size_t live = 0;
            for (const auto& e : r.mat) {
                if (!alive[e.block][e.i] || !alive[e.block][e.j]) continue;
                ++live;
                if (e.i != e.j) all_diag = false;
                int s = e.c > 0 ? 1 : -1;
                if (sign == 0)
                    sign = s;
                else if (sign != s)
                    mixed = true;
            }
            if (live == 0 && r.free_vars.empty()) {
                if (r.rhs != 0) {
                    sdp.presolve_infeasible = true;
                    sdp.presolve_reason = "no term can match a required coefficient";
                    return sdp;
                }
                row_dead[ri] = 1;
                changed = true;
                continue;
            }
            if (!r.free_vars.empty() || r.rhs != 0) continue;
            if (all_diag && !mixed && live > 0) {
                // only the live diagonal entries are forced to zero; entries whose
                // partner index is already dead contribute nothing and must not
                // drag their live index down with them
                for (const auto& e : r.mat)
                    if (e.i == e.j && alive[e.block][e.i]) alive[e.block][e.i] = 0;
                row_dead[ri] = 1;
                changed = true;
            }
        }
    }

    // compact bases and reindex entries
    std::vector<std::vector<int>> remap(sdp.blocks.size());
    for (size_t b = 0; b < sdp.blocks.size(); ++b) {
        remap[b].assign(sdp.blocks[b].basis.size(), -1);
        std::vector<ExpVec> nb;
        for (size_t i = 0; i < sdp.blocks[b].basis.size(); ++i) {
            if (!alive[b][i]) continue;
            remap[b][i] = static_cast<int>(nb.size());
            nb.push_back(sdp.blocks[b].basis[i]);
        }
        sdp.blocks[b].basis = std::move(nb);
    }
    std::vector<SdpRow> kept;
    for (size_t ri = 0; ri < sdp.rows.size(); ++ri) {
        if (row_dead[ri]) continue;
        SdpRow r = std::move(sdp.rows[ri]);
        std::vector<SdpCoef> mat;
        for (const auto& e : r.mat) {
            int ni = remap[e.block][e.i], nj = remap[e.block][e.j];
            if (ni < 0 || nj < 0) continue;
            mat.push_back(SdpCoef{e.block, ni, nj, e.c});
        }
        r.mat = std::move(mat);
        if (r.mat.empty() && r.free_vars.empty() && r.rhs == 0) continue;
        kept.push_back(std::move(r));
    }
    sdp.rows = std::move(kept);
    std::vector<SdpCoef> obj;
    for (const auto& e : sdp.obj_mat) {
        int ni = remap[e.block][e.i], nj = remap[e.block][e.j];
        if (ni < 0 || nj < 0) continue;
        obj.push_back(SdpCoef{e.block, ni, nj, e.c});
    }
    sdp.obj_mat = std::move(obj);
    return sdp;
}

std::string sdp_dump(const SdpProblem& sdp) {
    std::ostringstream os;
    os << "nblocks " << sdp.blocks.size() << "\n";
    for (const auto& b : sdp.blocks) os << "dim " << b.basis.size() << "\n";
    os << "nfree " << sdp.n_free << "\n";
    for (const auto& r : sdp.rows) {
        for (const auto& e : r.mat)
            os << rat_to_string(e.c) << " " << e.block << " " << e.i << " " << e.j << " ";
        for (const auto& [idx, c] : r.free_vars)
            os << rat_to_string(c) << " -1 " << idx << " 0 ";
        os << "rhs " << rat_to_string(r.rhs) << "\n";
    }
    return os.str();
}

namespace {

void accumulate_gram_poly(std::map<ExpVec, double>& acc, const Polynomial& weight,
                          const std::vector<ExpVec>& basis, const std::vector<double>& q) {
    int dim = static_cast<int>(basis.size());
    int n = weight.nvars();
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            double qv = q[static_cast<size_t>(i) * dim + j];
            if (qv == 0.0) continue;
            for (const auto& [ew, cw] : weight.terms()) {
                ExpVec m(n);
                for (int k2 = 0; k2 < n; ++k2) m[k2] = basis[i][k2] + basis[j][k2] + ew[k2];
                acc[m] += qv * rat_to_double(cw);
            }
        }
    }
}

double map_resid(const std::map<ExpVec, double>& recon, const std::map<ExpVec, double>& target,
                 double* target_scale) {
    double resid = 0.0, scale = 0.0;
    for (const auto& [m, v] : target) scale = std::max(scale, std::fabs(v));
    std::map<ExpVec, double> diff = recon;
    for (const auto& [m, v] : target) diff[m] -= v;
    for (const auto& [m, v] : diff) resid = std::max(resid, std::fabs(v));
    *target_scale = scale;
    return resid;
}

double gram_min_eig(const std::vector<double>& q, int dim) {
    if (dim == 0) return 0.0;
    std::vector<double> sym(q.size());
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            sym[static_cast<size_t>(i) * dim + j] =
                0.5 * (q[static_cast<size_t>(i) * dim + j] + q[static_cast<size_t>(j) * dim + i]);
    return linalg::sym_min_eig(sym, dim);
}

}  // namespace

SosCheck verify_sos(const Polynomial& target, const std::vector<ExpVec>& basis,
                    const std::vector<double>& q, double eig_tol, double match_tol) {
    SosCheck out;
    int dim = static_cast<int>(basis.size());
    std::map<ExpVec, double> recon;
    accumulate_gram_poly(recon, Polynomial::constant(target.nvars(), Rational(1)), basis, q);
    std::map<ExpVec, double> tgt;
    for (const auto& [m, c] : target.terms()) tgt[m] = rat_to_double(c);
    double scale = 0.0;
    out.max_resid = map_resid(recon, tgt, &scale);
    out.min_eig = gram_min_eig(q, dim);
    double qmax = 0.0;
    for (double v : q) qmax = std::max(qmax, std::fabs(v));
    out.ok = out.max_resid <= match_tol * (1.0 + scale) && out.min_eig >= -eig_tol * (1.0 + qmax);
    return out;
}

SosCheck verify_program(const SosProgram& prog, double mu,
                        const std::vector<double>& v_coeffs,
                        const std::vector<std::vector<double>>& grams,
                        const std::vector<std::vector<ExpVec>>& gram_bases,
                        double eig_tol, double match_tol) {
    SosCheck out;
    out.ok = true;
    out.min_eig = 0.0;
    out.max_resid = 0.0;
    size_t cursor = 0;
    for (const auto& con : prog.constraints) {
        std::map<ExpVec, double> lhs;
        for (const auto& [m, c] : con.fixed_base.terms()) lhs[m] += rat_to_double(c);
        for (const auto& [m, c] : con.fixed_mu.terms()) lhs[m] += mu * rat_to_double(c);
        for (size_t vm = 0; vm < con.v_coeff_polys.size(); ++vm)
            for (const auto& [m, c] : con.v_coeff_polys[vm].terms())
                lhs[m] += v_coeffs.at(vm) * rat_to_double(c);

        std::map<ExpVec, double> recon;
        double qmax = 0.0;
        for (const auto& slot : con.slots) {
            if (cursor >= grams.size()) throw SosError("verify_program: gram count mismatch");
            const auto& q = grams[cursor];
            const auto& basis = gram_bases[cursor];
            int dim = static_cast<int>(basis.size());
            if (static_cast<size_t>(dim) * dim != q.size())
                throw SosError("verify_program: gram dimension mismatch for " + slot.id);
            accumulate_gram_poly(recon, slot.weight, basis, q);
            out.min_eig = std::min(out.min_eig, gram_min_eig(q, dim));
            for (double v : q) qmax = std::max(qmax, std::fabs(v));
            ++cursor;
        }
        double scale = 0.0;
        double resid = map_resid(recon, lhs, &scale);
        out.max_resid = std::max(out.max_resid, resid);
        if (resid > match_tol * (1.0 + scale)) out.ok = false;
        if (out.min_eig < -eig_tol * (1.0 + qmax)) out.ok = false;
    }
    if (cursor != grams.size()) throw SosError("verify_program: gram count mismatch");
    return out;
}

}  // namespace ftscert
