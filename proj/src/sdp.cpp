#include "ftscert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ftscert/kernels.hpp"
#include "ftscert/linalg.hpp"
#include "ftscert/rational.hpp"
#include "ftscert/util.hpp"

namespace ftscert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct NumEntry {
    int block, i, j;  // i <= j; c carries the factor 2 for off-diagonal pairs
    double c;
};

struct NumRow {
    std::vector<NumEntry> mat;
    std::vector<std::pair<int, double>> fv;
    double rhs = 0.0;
};

using Block = std::vector<double>;
using Blocks = std::vector<Block>;

Blocks make_blocks(const std::vector<int>& dims, double diag) {
    Blocks out;
    out.reserve(dims.size());
    for (int d : dims) {
        Block b(static_cast<size_t>(d) * d, 0.0);
        for (int i = 0; i < d; ++i) b[static_cast<size_t>(i) * d + i] = diag;
        out.push_back(std::move(b));
    }
    return out;
}

void zero_blocks(Blocks& x) {
    for (auto& b : x) std::fill(b.begin(), b.end(), 0.0);
}

double inner_blocks(const Blocks& x, const Blocks& y) {
    const auto& ops = kernels::active();
    double s = 0.0;
    for (size_t b = 0; b < x.size(); ++b)
        if (!x[b].empty()) s += ops.dot(x[b].data(), y[b].data(), x[b].size());
    return s;
}

void axpy_blocks(double a, const Blocks& x, Blocks& y) {
    const auto& ops = kernels::active();
    for (size_t b = 0; b < x.size(); ++b)
        if (!x[b].empty()) ops.axpy(a, x[b].data(), y[b].data(), x[b].size());
}

void symmetrize_blocks(Blocks& x, const std::vector<int>& dims) {
    for (size_t b = 0; b < x.size(); ++b) {
        int d = dims[b];
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                double v = 0.5 * (x[b][static_cast<size_t>(i) * d + j] +
                                  x[b][static_cast<size_t>(j) * d + i]);
                x[b][static_cast<size_t>(i) * d + j] = v;
                x[b][static_cast<size_t>(j) * d + i] = v;
            }
        }
    }
}

double dot_row(const NumRow& r, const Blocks& x, const std::vector<int>& dims) {
    double s = 0.0;
    for (const auto& e : r.mat)
        s += e.c * x[e.block][static_cast<size_t>(e.i) * dims[e.block] + e.j];
    return s;
}

// out += scale * mat(A^T y): scatter row coefficients into dense symmetric blocks
void add_at_y(const std::vector<NumRow>& rows, const std::vector<double>& y, double scale,
              Blocks& out, const std::vector<int>& dims) {
    for (size_t r = 0; r < rows.size(); ++r) {
        double yr = scale * y[r];
        if (yr == 0.0) continue;
        for (const auto& e : rows[r].mat) {
            int d = dims[e.block];
            if (e.i == e.j) {
                out[e.block][static_cast<size_t>(e.i) * d + e.i] += yr * e.c;
            } else {
                out[e.block][static_cast<size_t>(e.i) * d + e.j] += 0.5 * yr * e.c;
                out[e.block][static_cast<size_t>(e.j) * d + e.i] += 0.5 * yr * e.c;
            }
        }
    }
}

// solve L B = B in place where L is lower triangular (row-major d x d), B is d x d
void solve_lower_cols(const Block& l, int d, Block& b) {
    for (int c = 0; c < d; ++c) {
        for (int i = 0; i < d; ++i) {
            double v = b[static_cast<size_t>(i) * d + c];
            for (int k = 0; k < i; ++k)
                v -= l[static_cast<size_t>(i) * d + k] * b[static_cast<size_t>(k) * d + c];
            b[static_cast<size_t>(i) * d + c] = v / l[static_cast<size_t>(i) * d + i];
        }
    }
}

void transpose_sq(Block& a, int d) {
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            std::swap(a[static_cast<size_t>(i) * d + j], a[static_cast<size_t>(j) * d + i]);
}

// W = sym(X * B * Sinv) per block, dense products
void sym_triple(const Blocks& x, const Blocks& b, const Blocks& sinv,
                const std::vector<int>& dims, Blocks& w, Blocks& scratch) {
    const auto& ops = kernels::active();
    for (size_t blk = 0; blk < x.size(); ++blk) {
        int d = dims[blk];
        if (d == 0) continue;
        size_t dd = static_cast<size_t>(d) * d;
        std::fill(scratch[blk].begin(), scratch[blk].end(), 0.0);
        std::fill(w[blk].begin(), w[blk].end(), 0.0);
        ops.gemm_acc(b[blk].data(), d, sinv[blk].data(), d, scratch[blk].data(), d, d, d, d);
        ops.gemm_acc(x[blk].data(), d, scratch[blk].data(), d, w[blk].data(), d, d, d, d);
        for (size_t t = 0; t < dd; ++t) {
            size_t i = t / d, j = t % d;
            if (j <= i) continue;
            double v = 0.5 * (w[blk][i * d + j] + w[blk][j * d + i]);
            w[blk][i * d + j] = v;
            w[blk][j * d + i] = v;
        }
    }
}

// largest alpha in [0, cap] with X + alpha dX psd (lines of the HKM step rule)
double max_step_block(const Block& xb, const Block& dxb, int d, double cap) {
    if (d == 0) return cap;
    Block l = xb;
    if (linalg::cholesky(l, d, 0.0)) {
        Block y = dxb;
        solve_lower_cols(l, d, y);  // y = L^-1 dX
        transpose_sq(y, d);
        solve_lower_cols(l, d, y);  // y = L^-1 dX^T L^-T (transpose of target, symmetric)
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                double v = 0.5 * (y[static_cast<size_t>(i) * d + j] +
                                  y[static_cast<size_t>(j) * d + i]);
                y[static_cast<size_t>(i) * d + j] = v;
                y[static_cast<size_t>(j) * d + i] = v;
            }
        double lam = linalg::sym_min_eig(y, d);
        if (lam >= -1e-14) return cap;
        return std::min(cap, -1.0 / lam);
    }
    // X barely positive definite: fall back to a bisection on factorizability
    auto psd_at = [&](double a) {
        Block t = xb;
        kernels::active().axpy(a, dxb.data(), t.data(), t.size());
        Block f = t;
        return linalg::cholesky(f, d, 0.0);
    };
    if (psd_at(cap)) return cap;
    double lo = 0.0, hi = cap;
    for (int it = 0; it < 40 && hi - lo > 1e-9 * (1.0 + lo); ++it) {
        double mid = 0.5 * (lo + hi);
        (psd_at(mid) ? lo : hi) = mid;
    }
    return lo;
}

struct Work {
    std::vector<int> dims;
    std::vector<NumRow> rows;
    std::vector<double> b;    // normalized rhs
    std::vector<double> cu;   // free-variable cost (standard form, min)
    Blocks cmat;              // matrix cost (standard form, min)
    bool has_obj = false;
    int m = 0, nf = 0, ntot = 0;
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& sdp, const SdpOptions& opts) {
    const auto& ops = kernels::active();
    SdpSolution sol;

    if (sdp.presolve_infeasible) {
        sol.status = SdpStatus::Infeasible;
        sol.detail = "presolve: " + sdp.presolve_reason;
        return sol;
    }

    Work w;
    for (const auto& blk : sdp.blocks) w.dims.push_back(static_cast<int>(blk.basis.size()));
    w.m = static_cast<int>(sdp.rows.size());
    w.nf = sdp.n_free;
    for (int d : w.dims) w.ntot += d;

    // numeric rows, each scaled to unit max coefficient
    w.rows.reserve(sdp.rows.size());
    w.b.reserve(sdp.rows.size());
    for (const auto& r : sdp.rows) {
        NumRow nr;
        double scale = std::fabs(rat_to_double(r.rhs));
        for (const auto& e : r.mat) scale = std::max(scale, std::fabs(rat_to_double(e.c)));
        for (const auto& [idx, c] : r.free_vars) scale = std::max(scale, std::fabs(rat_to_double(c)));
        double inv = scale > 0.0 ? 1.0 / scale : 1.0;
        for (const auto& e : r.mat)
            nr.mat.push_back(NumEntry{e.block, e.i, e.j, inv * rat_to_double(e.c)});
        for (const auto& [idx, c] : r.free_vars)
            nr.fv.emplace_back(idx, inv * rat_to_double(c));
        nr.rhs = inv * rat_to_double(r.rhs);
        w.b.push_back(nr.rhs);
        w.rows.push_back(std::move(nr));
    }

    w.cmat = make_blocks(w.dims, 0.0);
    w.cu.assign(w.nf, 0.0);
    if (opts.maximize_objective) {
        for (const auto& e : sdp.obj_mat) {
            int d = w.dims[e.block];
            double c = rat_to_double(e.c);
            if (e.i == e.j) {
                w.cmat[e.block][static_cast<size_t>(e.i) * d + e.i] -= c;
            } else {
                w.cmat[e.block][static_cast<size_t>(e.i) * d + e.j] -= 0.5 * c;
                w.cmat[e.block][static_cast<size_t>(e.j) * d + e.i] -= 0.5 * c;
            }
            w.has_obj = true;
        }
        for (const auto& [idx, c] : sdp.obj_free) {
            w.cu[idx] -= rat_to_double(c);
            w.has_obj = true;
        }
    }

    auto extract_objective = [&](const Blocks& xhat, const std::vector<double>& uhat) {
        return -(inner_blocks(w.cmat, xhat) + ops.dot(w.cu.data(), uhat.data(), w.cu.size()));
    };

    if (w.m == 0) {
        sol.status = SdpStatus::Feasible;
        sol.free_vals.assign(w.nf, 0.0);
        for (int d : w.dims) sol.grams.emplace_back(static_cast<size_t>(d) * d, 0.0);
        sol.detail = "no equality rows";
        return sol;
    }

    double bnorm = 0.0;
    for (double v : w.b) bnorm = std::max(bnorm, std::fabs(v));

    // homogeneous self-dual iterate
    Blocks X = make_blocks(w.dims, 1.0);
    Blocks S = make_blocks(w.dims, 1.0);
    std::vector<double> y(w.m, 0.0), u(w.nf, 0.0);
    double tau = 1.0, kappa = 1.0;

    Blocks Sinv = make_blocks(w.dims, 0.0);
    Blocks R2 = make_blocks(w.dims, 0.0);
    Blocks ATy = make_blocks(w.dims, 0.0);
    Blocks T2 = make_blocks(w.dims, 0.0);
    Blocks Pc = make_blocks(w.dims, 0.0);
    Blocks P0 = make_blocks(w.dims, 0.0);
    Blocks CORRX = make_blocks(w.dims, 0.0);
    Blocks Bm = make_blocks(w.dims, 0.0);
    Blocks dX = make_blocks(w.dims, 0.0);
    Blocks dS = make_blocks(w.dims, 0.0);
    Blocks dXa = make_blocks(w.dims, 0.0);
    Blocks dSa = make_blocks(w.dims, 0.0);
    Blocks scratch = make_blocks(w.dims, 0.0);

    int kk = w.m + w.nf + 1;
    std::vector<double> kkt(static_cast<size_t>(kk) * kk);
    std::vector<double> kktlu(kkt.size());
    std::vector<int> perm(kk);
    std::vector<double> rhs(kk), dy(w.m), du(w.nf);
    std::vector<double> g(w.m), M(static_cast<size_t>(w.m) * w.m);
    std::vector<double> atu(w.nf);

    double last_relres = kInf;

    for (int iter = 0; iter <= opts.max_iters; ++iter) {
        sol.iterations = iter;

        // extraction: does X/tau (with u/tau) satisfy the equalities?
        if (tau > 1e-12) {
            double relres = 0.0;
            for (const auto& r : w.rows) {
                double v = dot_row(r, X, w.dims);
                for (const auto& [idx, c] : r.fv) v += c * u[idx];
                relres = std::max(relres, std::fabs(v / tau - r.rhs));
            }
            relres /= 1.0 + bnorm;
            last_relres = relres;
            if (relres <= opts.feas_tol) {
                double gap = inner_blocks(X, S) / (tau * tau);
                double objval = 0.0;
                bool accept = true;
                if (w.has_obj) {
                    Blocks xhat = X;
                    for (auto& blk : xhat) ops.scal(1.0 / tau, blk.data(), blk.size());
                    std::vector<double> uhat = u;
                    ops.scal(1.0 / tau, uhat.data(), uhat.size());
                    objval = extract_objective(xhat, uhat);
                    accept = gap <= opts.obj_gap_tol * (1.0 + std::fabs(objval));
                }
                if (accept) {
                    sol.status = SdpStatus::Feasible;
                    sol.residual = relres;
                    sol.objective = objval;
                    sol.free_vals.assign(w.nf, 0.0);
                    for (int t = 0; t < w.nf; ++t) sol.free_vals[t] = u[t] / tau;
                    sol.grams.clear();
                    for (size_t blk = 0; blk < X.size(); ++blk) {
                        Block gb = X[blk];
                        ops.scal(1.0 / tau, gb.data(), gb.size());
                        sol.grams.push_back(std::move(gb));
                    }
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "feasible point extracted at iteration %d", iter);
                    sol.detail = buf;
                    return sol;
                }
            }
        }

        // infeasibility: dual improving ray
        double bty = ops.dot(w.b.data(), y.data(), w.b.size());
        if (bty > 1e-10) {
            std::vector<double> yhat = y;
            ops.scal(1.0 / bty, yhat.data(), yhat.size());
            std::fill(atu.begin(), atu.end(), 0.0);
            for (int r = 0; r < w.m; ++r)
                for (const auto& [idx, c] : w.rows[r].fv) atu[idx] += c * yhat[r];
            double atu_norm = 0.0;
            for (double v : atu) atu_norm = std::max(atu_norm, std::fabs(v));
            if (atu_norm <= 1e-8) {
                zero_blocks(ATy);
                add_at_y(w.rows, yhat, 1.0, ATy, w.dims);
                double lam_max = -kInf;
                bool any = false;
                for (size_t blk = 0; blk < ATy.size(); ++blk) {
                    int d = w.dims[blk];
                    if (d == 0) continue;
                    any = true;
                    Block neg = ATy[blk];
                    ops.scal(-1.0, neg.data(), neg.size());
                    lam_max = std::max(lam_max, -linalg::sym_min_eig(neg, d));
                }
                if (!any) lam_max = 0.0;
                if (lam_max <= 1e-8) {
                    sol.status = SdpStatus::Infeasible;
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "dual improving ray found at iteration %d", iter);
                    sol.detail = buf;
                    sol.residual = last_relres;
                    return sol;
                }
            }
        }

        if (iter == opts.max_iters) break;

        // factor S, with a nudge if roundoff pushed it off the cone
        bool chol_ok = false;
        for (int attempt = 0; attempt < 3 && !chol_ok; ++attempt) {
            chol_ok = true;
            for (size_t blk = 0; blk < S.size() && chol_ok; ++blk) {
                int d = w.dims[blk];
                if (d == 0) continue;
                Block l = S[blk];
                if (!linalg::cholesky(l, d, 0.0)) chol_ok = false;
            }
            if (!chol_ok) {
                double jitter = attempt == 0 ? 1e-13 : (attempt == 1 ? 1e-11 : 1e-9);
                for (size_t blk = 0; blk < S.size(); ++blk) {
                    int d = w.dims[blk];
                    for (int i = 0; i < d; ++i)
                        S[blk][static_cast<size_t>(i) * d + i] += jitter;
                }
            }
        }
        if (!chol_ok) {
            sol.status = SdpStatus::Indeterminate;
            sol.detail = "dual slack lost positive definiteness";
            sol.residual = last_relres;
            return sol;
        }

        // S^-1 per block
        for (size_t blk = 0; blk < S.size(); ++blk) {
            int d = w.dims[blk];
            if (d == 0) continue;
            Block l = S[blk];
            linalg::cholesky(l, d, 0.0);
            Block& inv = Sinv[blk];
            std::fill(inv.begin(), inv.end(), 0.0);
            std::vector<double> col(d);
            for (int c = 0; c < d; ++c) {
                std::fill(col.begin(), col.end(), 0.0);
                col[c] = 1.0;
                linalg::chol_solve(l, d, col);
                for (int i = 0; i < d; ++i) inv[static_cast<size_t>(i) * d + c] = col[i];
            }
        }

        // residuals
        std::vector<double> r1(w.m);
        for (int r = 0; r < w.m; ++r) {
            double v = w.b[r] * tau - dot_row(w.rows[r], X, w.dims);
            for (const auto& [idx, c] : w.rows[r].fv) v -= c * u[idx];
            r1[r] = v;
        }
        zero_blocks(ATy);
        add_at_y(w.rows, y, 1.0, ATy, w.dims);
        for (size_t blk = 0; blk < R2.size(); ++blk) {
            R2[blk] = w.cmat[blk];
            ops.scal(tau, R2[blk].data(), R2[blk].size());
            ops.axpy(-1.0, ATy[blk].data(), R2[blk].data(), R2[blk].size());
            ops.axpy(-1.0, S[blk].data(), R2[blk].data(), R2[blk].size());
        }
        std::vector<double> r3(w.nf);
        std::fill(atu.begin(), atu.end(), 0.0);
        for (int r = 0; r < w.m; ++r)
            for (const auto& [idx, c] : w.rows[r].fv) atu[idx] += c * y[r];
        for (int t = 0; t < w.nf; ++t) r3[t] = w.cu[t] * tau - atu[t];
        double cdotx = inner_blocks(w.cmat, X);
        double r4 = ops.dot(w.b.data(), y.data(), w.b.size()) - cdotx -
                    ops.dot(w.cu.data(), u.data(), w.cu.size()) - kappa;

        double nu = (inner_blocks(X, S) + tau * kappa) / (w.ntot + 1);

        // shared pieces: T2 = sym(X R2 S^-1), Pc = sym(X C S^-1), g = A(Pc)
        sym_triple(X, R2, Sinv, w.dims, T2, scratch);
        if (w.has_obj) {
            sym_triple(X, w.cmat, Sinv, w.dims, Pc, scratch);
        } else {
            zero_blocks(Pc);
        }
        for (int r = 0; r < w.m; ++r) g[r] = w.has_obj ? dot_row(w.rows[r], Pc, w.dims) : 0.0;
        double cdotpc = w.has_obj ? inner_blocks(w.cmat, Pc) : 0.0;

        // Schur complement M_ij = tr(A_i W_j), W_j = sym(X A_j S^-1)
        parallel_for(static_cast<size_t>(w.m), [&](size_t j) {
            Blocks wj = make_blocks(w.dims, 0.0);
            for (const auto& e : w.rows[j].mat) {
                int d = w.dims[e.block];
                const double* xb = X[e.block].data();
                const double* sb = Sinv[e.block].data();
                double* ub = wj[e.block].data();
                auto rank1 = [&](int p, int q, double coef) {
                    const double* xrow = xb + static_cast<size_t>(p) * d;
                    const double* srow = sb + static_cast<size_t>(q) * d;
                    for (int rr = 0; rr < d; ++rr)
                        ops.axpy(coef * xrow[rr], srow, ub + static_cast<size_t>(rr) * d, d);
                };
                if (e.i == e.j) {
                    rank1(e.i, e.j, e.c);
                } else {
                    rank1(e.i, e.j, 0.5 * e.c);
                    rank1(e.j, e.i, 0.5 * e.c);
                }
            }
            for (size_t blk = 0; blk < wj.size(); ++blk) {
                int d = w.dims[blk];
                for (int a = 0; a < d; ++a)
                    for (int bcol = a + 1; bcol < d; ++bcol) {
                        double v = 0.5 * (wj[blk][static_cast<size_t>(a) * d + bcol] +
                                          wj[blk][static_cast<size_t>(bcol) * d + a]);
                        wj[blk][static_cast<size_t>(a) * d + bcol] = v;
                        wj[blk][static_cast<size_t>(bcol) * d + a] = v;
                    }
            }
            for (int i = 0; i < w.m; ++i)
                M[static_cast<size_t>(i) * w.m + j] = dot_row(w.rows[i], wj, w.dims);
        });

        // bordered system over (dy, du, dtau)
        std::fill(kkt.begin(), kkt.end(), 0.0);
        for (int i = 0; i < w.m; ++i) {
            for (int j = 0; j < w.m; ++j)
                kkt[static_cast<size_t>(i) * kk + j] = M[static_cast<size_t>(i) * w.m + j];
            for (const auto& [idx, c] : w.rows[i].fv) kkt[static_cast<size_t>(i) * kk + w.m + idx] = c;
            kkt[static_cast<size_t>(i) * kk + w.m + w.nf] = -(w.b[i] + g[i]);
        }
        for (int i = 0; i < w.m; ++i)
            for (const auto& [idx, c] : w.rows[i].fv)
                kkt[static_cast<size_t>(w.m + idx) * kk + i] = c;
        for (int t = 0; t < w.nf; ++t)
            kkt[static_cast<size_t>(w.m + t) * kk + w.m + w.nf] = -w.cu[t];
        for (int j = 0; j < w.m; ++j)
            kkt[static_cast<size_t>(w.m + w.nf) * kk + j] = g[j] - w.b[j];
        for (int t = 0; t < w.nf; ++t)
            kkt[static_cast<size_t>(w.m + w.nf) * kk + w.m + t] = w.cu[t];
        kkt[static_cast<size_t>(w.m + w.nf) * kk + w.m + w.nf] = -(cdotpc + kappa / tau);

        kktlu = kkt;
        bool lu_ok = linalg::lu_factor(kktlu, kk, perm);
        if (!lu_ok) {
            kktlu = kkt;
            for (int i = 0; i < kk; ++i) kktlu[static_cast<size_t>(i) * kk + i] += 1e-11;
            lu_ok = linalg::lu_factor(kktlu, kk, perm);
        }
        if (!lu_ok) {
            sol.status = SdpStatus::Indeterminate;
            sol.detail = "singular reduced system";
            sol.residual = last_relres;
            return sol;
        }

        auto solve_direction = [&](double signu, const Blocks& corrx, double corrtau,
                                   Blocks& dx, Blocks& ds, std::vector<double>& dyv,
                                   std::vector<double>& duv, double& dtau, double& dkappa) {
            // P0 = signu * Sinv - X - T2 - corrx
            for (size_t blk = 0; blk < P0.size(); ++blk) {
                P0[blk] = Sinv[blk];
                ops.scal(signu, P0[blk].data(), P0[blk].size());
                ops.axpy(-1.0, X[blk].data(), P0[blk].data(), P0[blk].size());
                ops.axpy(-1.0, T2[blk].data(), P0[blk].data(), P0[blk].size());
                if (!corrx.empty()) ops.axpy(-1.0, corrx[blk].data(), P0[blk].data(), P0[blk].size());
            }
            double cdotp0 = w.has_obj ? inner_blocks(w.cmat, P0) : 0.0;
            double comp = (signu - tau * kappa - corrtau) / tau;
            for (int r = 0; r < w.m; ++r) rhs[r] = r1[r] - dot_row(w.rows[r], P0, w.dims);
            for (int t = 0; t < w.nf; ++t) rhs[w.m + t] = r3[t];
            rhs[w.m + w.nf] = r4 - cdotp0 - comp;
            linalg::lu_solve(kktlu, kk, perm, rhs);
            for (int r = 0; r < w.m; ++r) dyv[r] = rhs[r];
            for (int t = 0; t < w.nf; ++t) duv[t] = rhs[w.m + t];
            dtau = rhs[w.m + w.nf];
            // dS = R2 + C dtau - mat(A^T dy)
            zero_blocks(Bm);
            add_at_y(w.rows, dyv, 1.0, Bm, w.dims);
            for (size_t blk = 0; blk < ds.size(); ++blk) {
                ds[blk] = R2[blk];
                ops.axpy(dtau, w.cmat[blk].data(), ds[blk].data(), ds[blk].size());
                ops.axpy(-1.0, Bm[blk].data(), ds[blk].data(), ds[blk].size());
            }
            // dX = P0 - dtau Pc + sym(X mat(A^T dy) S^-1)
            sym_triple(X, Bm, Sinv, w.dims, dx, scratch);
            axpy_blocks(1.0, P0, dx);
            if (w.has_obj) axpy_blocks(-dtau, Pc, dx);
            dkappa = comp - (kappa / tau) * dtau;
        };

        auto step_bound = [&](const Blocks& dx, const Blocks& ds, double dtau, double dkappa) {
            double a = 1.0;
            for (size_t blk = 0; blk < X.size(); ++blk) {
                a = std::min(a, max_step_block(X[blk], dx[blk], w.dims[blk], a));
                a = std::min(a, max_step_block(S[blk], ds[blk], w.dims[blk], a));
            }
            if (dtau < 0.0) a = std::min(a, -tau / dtau);
            if (dkappa < 0.0) a = std::min(a, -kappa / dkappa);
            return a;
        };

        // predictor
        double dtau_a = 0.0, dkappa_a = 0.0;
        solve_direction(0.0, Blocks{}, 0.0, dXa, dSa, dy, du, dtau_a, dkappa_a);
        double alpha_a = step_bound(dXa, dSa, dtau_a, dkappa_a);

        double ip = inner_blocks(X, S) + alpha_a * inner_blocks(dXa, S) +
                    alpha_a * inner_blocks(X, dSa) +
                    alpha_a * alpha_a * inner_blocks(dXa, dSa);
        double tk = (tau + alpha_a * dtau_a) * (kappa + alpha_a * dkappa_a);
        double nu_aff = std::max(0.0, (ip + tk) / (w.ntot + 1));
        double sigma = nu > 0.0 ? std::pow(nu_aff / nu, 3.0) : 0.0;
        sigma = std::min(0.99999, std::max(1e-8, sigma));

        // corrector
        sym_triple(dXa, dSa, Sinv, w.dims, CORRX, scratch);
        double corrtau = dtau_a * dkappa_a;
        std::vector<double> dyc(w.m), duc(w.nf);
        double dtau_c = 0.0, dkappa_c = 0.0;
        solve_direction(sigma * nu, CORRX, corrtau, dX, dS, dyc, duc, dtau_c, dkappa_c);

        double alpha = 0.99 * step_bound(dX, dS, dtau_c, dkappa_c);
        alpha = std::min(1.0, alpha);
        if (alpha < 1e-13) {
            sol.status = SdpStatus::Indeterminate;
            char buf[96];
            std::snprintf(buf, sizeof buf, "step length collapsed at iteration %d", iter);
            sol.detail = buf;
            sol.residual = last_relres;
            return sol;
        }

        axpy_blocks(alpha, dX, X);
        axpy_blocks(alpha, dS, S);
        symmetrize_blocks(X, w.dims);
        symmetrize_blocks(S, w.dims);
        ops.axpy(alpha, dyc.data(), y.data(), y.size());
        if (w.nf > 0) ops.axpy(alpha, duc.data(), u.data(), u.size());
        tau += alpha * dtau_c;
        kappa += alpha * dkappa_c;
    }

    sol.status = SdpStatus::Indeterminate;
    sol.detail = "iteration limit reached";
    sol.residual = last_relres;
    return sol;
}

MuSearchResult bisect_mu(const SosProgram& prog, double lo, double hi,
                         const SdpOptions& opts, double tol_scale) {
    MuSearchResult out;
    auto probe = [&](double mu) {
        SdpProblem sdp = assemble_sdp(prog, rat_from_double(mu), true);
        SdpSolution s;
        if (sdp.presolve_infeasible) {
            s.status = SdpStatus::Infeasible;
            s.detail = "presolve: " + sdp.presolve_reason;
        } else {
            s = solve_sdp(sdp, opts);
        }
        ++out.probes;
        const char* st = s.status == SdpStatus::Feasible     ? "feasible"
                         : s.status == SdpStatus::Infeasible ? "infeasible"
                                                             : "indeterminate";
        char buf[160];
        std::snprintf(buf, sizeof buf, "mu=%.10g -> %s (%d iterations)", mu, st, s.iterations);
        out.log.emplace_back(buf);
        return s;
    };

    if (hi < lo) std::swap(lo, hi);
    SdpSolution slo = probe(lo);
    if (slo.status != SdpStatus::Feasible) {
        out.certified = false;
        out.mu = lo;
        out.solution = std::move(slo);
        return out;
    }
    double feas = lo;
    SdpSolution best = std::move(slo);
    SdpSolution shi = probe(hi);
    if (shi.status == SdpStatus::Feasible) {
        feas = hi;
        best = std::move(shi);
    } else {
        double inf = hi;
        // tolerance tracks the running estimate so it stays relative to mu*
        while (inf - feas > tol_scale * (1.0 + feas)) {
            double mid = 0.5 * (feas + inf);
            SdpSolution sm = probe(mid);
            if (sm.status == SdpStatus::Feasible) {
                feas = mid;
                best = std::move(sm);
            } else {
                inf = mid;
            }
        }
    }
    out.mu = feas;
    out.certified = feas > 0.0;
    out.solution = std::move(best);
    return out;
}

}  // namespace ftscert
