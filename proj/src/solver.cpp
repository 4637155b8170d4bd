#include "sosmat/sdp.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <stdexcept>

// Homogeneous self-dual interior-point method with Nesterov-Todd scaling and
// a Mehrotra predictor-corrector step. The LMI problem is converted to the
// conic standard pair
//     (P) min <c,x>  s.t. Ax = b_c, x in K
//     (D) max <b_c,z> s.t. c - A^T z in K*
// whose dual variable z equals the LMI y. K-side (Gram-side) infeasibility is
// therefore reported as DualInfeasible and z-side infeasibility as
// PrimalInfeasible, matching the LMI orientation of SdpStatus.

namespace sosmat {

std::string to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "Optimal";
        case SdpStatus::PrimalInfeasible: return "PrimalInfeasible";
        case SdpStatus::DualInfeasible: return "DualInfeasible";
        case SdpStatus::MaxIterations: return "MaxIterations";
        case SdpStatus::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct ConeLayout {
    std::vector<int> psd;       // PSD block sizes
    std::vector<int> psd_off;   // svec offsets
    int lp_size = 0;
    int lp_off = 0;
    int free_off = 0;   // start of the unconstrained coordinates
    int free_count = 0;
    int dim = 0;                // total dimension including free coordinates
    int degree = 0;             // barrier degree: sum of psd sizes + lp size

    static int svec_len(int n) { return n * (n + 1) / 2; }
};

// row-major upper triangle
inline int svec_index(int n, int i, int j) {
    // i <= j
    return i * n - i * (i - 1) / 2 + (j - i);
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v, int off, int n) {
    Eigen::MatrixXd M(n, n);
    int k = off;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double val = v[k++];
            if (i == j)
                M(i, i) = val;
            else
                M(i, j) = M(j, i) = val / kSqrt2;
        }
    return M;
}

void svec_into(const Eigen::MatrixXd& M, Eigen::VectorXd& v, int off) {
    int n = static_cast<int>(M.rows());
    int k = off;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            v[k++] = i == j ? M(i, i) : kSqrt2 * 0.5 * (M(i, j) + M(j, i));
}

struct ConicData {
    ConeLayout cone;
    Eigen::SparseMatrix<double, Eigen::RowMajor> A; // p x dim
    Eigen::VectorXd b; // p
    Eigen::VectorXd c; // dim
    Eigen::VectorXd row_scale, col_scale; // empty = unscaled
};

// Ruiz equilibration: diagonal scalings pushing the row and column max-norms
// of A toward 1. Coordinates of one svec block share a scale so the PSD cone
// is preserved; LP and free coordinates are scaled individually.
void equilibrate(ConicData& d) {
    const int p = static_cast<int>(d.A.rows()), dim = d.cone.dim;
    if (p == 0 || dim == 0) return;
    std::vector<int> grp(static_cast<std::size_t>(dim));
    int ngrp = 0;
    for (std::size_t k = 0; k < d.cone.psd.size(); ++k) {
        int len = ConeLayout::svec_len(d.cone.psd[k]);
        for (int i = 0; i < len; ++i) grp[static_cast<std::size_t>(d.cone.psd_off[k] + i)] = ngrp;
        ++ngrp;
    }
    for (int i = d.cone.lp_off; i < dim; ++i) grp[static_cast<std::size_t>(i)] = ngrp++;

    d.row_scale = Eigen::VectorXd::Ones(p);
    d.col_scale = Eigen::VectorXd::Ones(dim);
    Eigen::VectorXd dr(p), dg(ngrp);
    for (int pass = 0; pass < 10; ++pass) {
        dr.setZero();
        dg.setZero();
        for (int r = 0; r < p; ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(d.A, r); it; ++it) {
                double a = std::abs(it.value());
                dr[r] = std::max(dr[r], a);
                int g = grp[static_cast<std::size_t>(it.col())];
                dg[g] = std::max(dg[g], a);
            }
        double spread = 1.0;
        for (int r = 0; r < p; ++r) {
            dr[r] = dr[r] > 0 ? 1.0 / std::sqrt(dr[r]) : 1.0;
            spread = std::max(spread, std::max(dr[r], 1.0 / dr[r]));
        }
        for (int g = 0; g < ngrp; ++g) {
            dg[g] = dg[g] > 0 ? 1.0 / std::sqrt(dg[g]) : 1.0;
            spread = std::max(spread, std::max(dg[g], 1.0 / dg[g]));
        }
        if (spread < 1.2) break;
        for (int r = 0; r < p; ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(d.A, r); it; ++it)
                it.valueRef() *= dr[r] * dg[grp[static_cast<std::size_t>(it.col())]];
        d.row_scale.array() *= dr.array();
        for (int k = 0; k < dim; ++k) d.col_scale[k] *= dg[grp[static_cast<std::size_t>(k)]];
    }
    d.b.array() *= d.row_scale.array();
    d.c.array() *= d.col_scale.array();
}

ConicData build_conic(const SdpProblem& p) {
    ConicData d;
    int lp_total = 0;
    std::vector<int> blk_kind; // >=0: index into cone.psd; <0: ~offset into LP segment
    for (int bs : p.blocks) {
        if (bs > 0) {
            blk_kind.push_back(static_cast<int>(d.cone.psd.size()));
            d.cone.psd.push_back(bs);
        } else {
            blk_kind.push_back(~lp_total);
            lp_total += -bs;
        }
    }
    d.cone.lp_size = lp_total;
    int off = 0;
    for (int n : d.cone.psd) {
        d.cone.psd_off.push_back(off);
        off += ConeLayout::svec_len(n);
    }
    d.cone.lp_off = off;
    d.cone.free_off = off + lp_total;
    d.cone.free_count = p.free_vars;
    d.cone.dim = off + lp_total + p.free_vars;
    d.cone.degree = d.cone.lp_size;
    for (int n : d.cone.psd) d.cone.degree += n;

    int ell = p.var_count();
    d.b = -p.b;
    d.c = Eigen::VectorXd::Zero(d.cone.dim);

    auto place = [&](const SdpProblem::Triplet& t, Eigen::VectorXd& target, double sign) {
        int kind = blk_kind.at(static_cast<std::size_t>(t.block));
        if (kind >= 0) {
            int n = d.cone.psd[static_cast<std::size_t>(kind)];
            int i = std::min(t.row, t.col), j = std::max(t.row, t.col);
            target[d.cone.psd_off[static_cast<std::size_t>(kind)] + svec_index(n, i, j)] +=
                sign * t.value * (i == j ? 1.0 : kSqrt2);
        } else {
            if (t.row != t.col) throw std::invalid_argument("off-diagonal entry in LP block");
            target[d.cone.lp_off + ~kind + t.row] += sign * t.value;
        }
    };

    for (const auto& t : p.F0) place(t, d.c, 1.0);
    for (int j = 0; j < p.free_vars; ++j) d.c[d.cone.free_off + j] = p.f0[j];

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rowbuf = Eigen::VectorXd::Zero(d.cone.dim);
    for (int i = 0; i < ell; ++i) {
        rowbuf.setZero();
        for (const auto& t : p.F[static_cast<std::size_t>(i)]) place(t, rowbuf, -1.0);
        for (int j = 0; j < p.free_vars; ++j) rowbuf[d.cone.free_off + j] += p.G(i, j);
        for (int k = 0; k < d.cone.dim; ++k)
            if (rowbuf[k] != 0.0) trips.emplace_back(i, k, rowbuf[k]);
    }
    d.A.resize(ell, d.cone.dim);
    d.A.setFromTriplets(trips.begin(), trips.end());
    d.A.makeCompressed();
    return d;
}

struct BlockScaling {
    Eigen::MatrixXd R;    // W = R R^T, R^T S R = R^{-1} X R^{-T} = Diag(lam)
    Eigen::MatrixXd Rinv;
    Eigen::VectorXd lam;
};

struct IterState {
    Eigen::VectorXd x, s; // cone variables (svec)
    Eigen::VectorXd z;    // multipliers, size p
    double tau = 1.0, kappa = 1.0;
};

class HsdSolver {
public:
    HsdSolver(const ConicData& d, const SolveOptions& opts) : d_(d), opts_(opts) {
        rows_by_block();
    }

    // W * mat(v) * W applied segment-wise; free coordinates carry no scaling
    // and are zeroed (they are handled exactly through the augmented system)
    Eigen::VectorXd apply_W(const Eigen::VectorXd& v) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(d_.cone.dim);
        for (std::size_t k = 0; k < d_.cone.psd.size(); ++k) {
            int n = d_.cone.psd[k], off = d_.cone.psd_off[k];
            Eigen::MatrixXd M = smat(v, off, n);
            Eigen::MatrixXd W = scal_[k].R * scal_[k].R.transpose();
            Eigen::MatrixXd out_m = W * M * W;
            svec_into(out_m, out, off);
        }
        for (int i = 0; i < d_.cone.lp_size; ++i) {
            int k = d_.cone.lp_off + i;
            out[k] = lp_w2_[i] * v[k];
        }
        return out;
    }

    SdpSolution run();

private:
    void rows_by_block() {
        // rows of A restricted to each PSD block, as dense local matrices
        block_rows_.resize(d_.cone.psd.size());
        for (int r = 0; r < d_.A.rows(); ++r) {
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(d_.A, r); it; ++it) {
                int col = static_cast<int>(it.col());
                for (std::size_t k = 0; k < d_.cone.psd.size(); ++k) {
                    int off = d_.cone.psd_off[k];
                    int len = ConeLayout::svec_len(d_.cone.psd[k]);
                    if (col >= off && col < off + len) {
                        if (block_rows_[k].empty() || block_rows_[k].back().first != r)
                            block_rows_[k].emplace_back(r, std::vector<std::pair<int, double>>{});
                        block_rows_[k].back().second.emplace_back(col - off, it.value());
                    }
                }
            }
        }
    }

    bool update_scalings(const IterState& it) {
        scal_.resize(d_.cone.psd.size());
        for (std::size_t k = 0; k < d_.cone.psd.size(); ++k) {
            int n = d_.cone.psd[k], off = d_.cone.psd_off[k];
            Eigen::MatrixXd X = smat(it.x, off, n), S = smat(it.s, off, n);
            Eigen::LLT<Eigen::MatrixXd> lx(X), ls(S);
            if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
            Eigen::MatrixXd Lx = lx.matrixL(), Ls = ls.matrixL();
            Eigen::BDCSVD<Eigen::MatrixXd> svd(Ls.transpose() * Lx,
                                               Eigen::ComputeFullU | Eigen::ComputeFullV);
            Eigen::VectorXd sig = svd.singularValues();
            if (sig.minCoeff() <= 0.0) return false;
            BlockScaling bs;
            bs.lam = sig;
            Eigen::VectorXd isqrt = sig.cwiseSqrt().cwiseInverse();
            bs.R = Lx * svd.matrixV() * isqrt.asDiagonal();
            bs.Rinv = sig.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                      Lx.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
            scal_[k] = std::move(bs);
        }
        lp_w2_.resize(static_cast<std::size_t>(d_.cone.lp_size));
        for (int i = 0; i < d_.cone.lp_size; ++i) {
            int k = d_.cone.lp_off + i;
            if (it.x[k] <= 0.0 || it.s[k] <= 0.0) return false;
            lp_w2_[static_cast<std::size_t>(i)] = it.x[k] / it.s[k];
        }
        return true;
    }

    Eigen::MatrixXd build_schur() {
        int p = static_cast<int>(d_.A.rows());
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
        for (std::size_t k = 0; k < d_.cone.psd.size(); ++k) {
            int n = d_.cone.psd[k];
            const auto& rows = block_rows_[k];
            if (rows.empty()) continue;
            Eigen::MatrixXd B(rows.size(), ConeLayout::svec_len(n));
            Eigen::MatrixXd Mi(n, n), Vi(n, n);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                Mi.setZero();
                for (auto [loc, val] : rows[r].second) {
                    // invert svec index
                    int i = 0, rem = loc;
                    while (rem >= n - i) { rem -= n - i; ++i; }
                    int j = i + rem;
                    if (i == j)
                        Mi(i, i) = val;
                    else
                        Mi(i, j) = Mi(j, i) = val / kSqrt2;
                }
                Vi.noalias() = scal_[k].R.transpose() * Mi * scal_[k].R;
                Eigen::VectorXd row(ConeLayout::svec_len(n));
                svec_into(Vi, row, 0);
                B.row(static_cast<Eigen::Index>(r)) = row;
            }
            Eigen::MatrixXd Mk = B * B.transpose();
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t b = 0; b < rows.size(); ++b)
                    M(rows[a].first, rows[b].first) += Mk(static_cast<Eigen::Index>(a),
                                                          static_cast<Eigen::Index>(b));
        }
        // LP part: A_lp diag(w2) A_lp^T; the free-variable columns are not
        // scaled and enter through the augmented system instead
        for (int r = 0; r < d_.A.rows(); ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(d_.A, r); it; ++it) {
                int col = static_cast<int>(it.col());
                if (col < d_.cone.lp_off || col >= d_.cone.free_off) continue;
                double wv = lp_w2_[static_cast<std::size_t>(col - d_.cone.lp_off)] * it.value();
                for (int r2 = 0; r2 < d_.A.rows(); ++r2) {
                    double a2 = d_.A.coeff(r2, col);
                    if (a2 != 0.0) M(r, r2) += wv * a2;
                }
            }
        return M;
    }

    // max step alpha in (0,1] keeping x + alpha dx in the cone interior fraction
    double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) const {
        double amax = 1.0 / 0.98; // allow full step after damping
        for (std::size_t k = 0; k < d_.cone.psd.size(); ++k) {
            int n = d_.cone.psd[k], off = d_.cone.psd_off[k];
            Eigen::MatrixXd V = smat(v, off, n), D = smat(dv, off, n);
            Eigen::LLT<Eigen::MatrixXd> llt(V);
            if (llt.info() != Eigen::Success) return 0.0;
            Eigen::MatrixXd L = llt.matrixL();
            Eigen::MatrixXd T = L.triangularView<Eigen::Lower>().solve(D);
            T = L.triangularView<Eigen::Lower>().solve(T.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()),
                                                              Eigen::EigenvaluesOnly);
            double mn = es.eigenvalues().minCoeff();
            if (mn < 0.0) amax = std::min(amax, -1.0 / mn);
        }
        for (int i = 0; i < d_.cone.lp_size; ++i) {
            int k = d_.cone.lp_off + i;
            if (dv[k] < 0.0) amax = std::min(amax, -v[k] / dv[k]);
        }
        return amax;
    }

    struct Direction {
        Eigen::VectorXd dx, ds, dz;
        double dtau = 0.0, dkappa = 0.0;
    };

    // factor of the augmented system
    //     [ M   Af ] [dz  ]   [rhs_p]
    //     [ Af^T 0 ] [dx_f] = [rhs_f]
    // where M is the Schur complement over the scaled cone part and Af the
    // free-variable columns; regularized quasi-definite LU with iterative
    // refinement against the exact matrix
    struct SchurFactor {
        Eigen::MatrixXd K;  // exact augmented matrix, refinement target
        Eigen::PartialPivLU<Eigen::MatrixXd> lu;  // factor of regularized K
        Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
            Eigen::VectorXd u = lu.solve(rhs);
            for (int pass = 0; pass < 3; ++pass) {
                Eigen::VectorXd r = rhs - K * u;
                if (r.norm() <= 1e-14 * (1.0 + rhs.norm())) break;
                u += lu.solve(r);
            }
            return u;
        }
    };

    // solve the Newton system given complementarity right-hand sides r4 (svec)
    // and r5 (scalar) plus the feasibility right-hand sides; u2 is the
    // precomputed augmented solve for the dtau column
    Direction solve_newton(const IterState& it, const SchurFactor& schur,
                           const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, double r3,
                           const Eigen::VectorXd& r4, double r5, const Eigen::VectorXd& Wc,
                           const Eigen::VectorXd& u2, double cWc) {
        int p = static_cast<int>(d_.A.rows());
        int m = d_.cone.free_count;
        Eigen::VectorXd Wr2 = apply_W(r2);
        Eigen::VectorXd rhs(p + m);
        rhs.head(p) = r1 - d_.A * (r4 - Wr2);
        rhs.tail(m) = r2.segment(d_.cone.free_off, m);
        Eigen::VectorXd u1 = schur.solve(rhs);

        Eigen::VectorXd cf = d_.c.segment(d_.cone.free_off, m);
        Eigen::VectorXd bmAWc = d_.b - d_.A * Wc;
        double denom = bmAWc.dot(u2.head(p)) - cf.dot(u2.tail(m)) + cWc + it.kappa / it.tau;
        double num = r3 + d_.c.dot(r4) - d_.c.dot(Wr2) + r5 / it.tau - bmAWc.dot(u1.head(p)) +
                     cf.dot(u1.tail(m));
        Direction dir;
        dir.dtau = denom != 0.0 ? num / denom : 0.0;
        dir.dz = u1.head(p) + dir.dtau * u2.head(p);
        dir.ds = r2 - d_.A.transpose() * dir.dz + d_.c * dir.dtau;
        dir.ds.segment(d_.cone.free_off, m).setZero();
        dir.dx = r4 - apply_W(dir.ds);
        dir.dx.segment(d_.cone.free_off, m) = u1.tail(m) + dir.dtau * u2.tail(m);
        dir.dkappa = (r5 - it.kappa * dir.dtau) / it.tau;
        return dir;
    }

    // one extra refinement pass against the full Newton system; the Schur
    // reduction loses digits when the iterate is large (dx comes out of a
    // difference of much larger terms)
    Direction solve_refined(const IterState& it, const SchurFactor& schur,
                            const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, double r3,
                            const Eigen::VectorXd& r4, double r5, const Eigen::VectorXd& Wc,
                            const Eigen::VectorXd& u2, double cWc) {
        Direction dir = solve_newton(it, schur, r1, r2, r3, r4, r5, Wc, u2, cWc);
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd e1 = r1 - (d_.A * dir.dx - d_.b * dir.dtau);
            Eigen::VectorXd e2 = r2 - (d_.A.transpose() * dir.dz + dir.ds - d_.c * dir.dtau);
            double e3 = r3 - (d_.b.dot(dir.dz) - d_.c.dot(dir.dx) - dir.dkappa);
            Eigen::VectorXd e4 = r4 - (dir.dx + apply_W(dir.ds));
            e4.segment(d_.cone.free_off, d_.cone.free_count).setZero();
            double e5 = r5 - (it.tau * dir.dkappa + it.kappa * dir.dtau);
            double enorm = e1.norm() + e2.norm() + std::abs(e3) + e4.norm() + std::abs(e5);
            double rnorm = r1.norm() + r2.norm() + std::abs(r3) + r4.norm() + std::abs(r5);
            if (enorm <= 1e-14 * (1.0 + rnorm)) break;
            Direction corr = solve_newton(it, schur, e1, e2, e3, e4, e5, Wc, u2, cWc);
            dir.dx += corr.dx;
            dir.ds += corr.ds;
            dir.dz += corr.dz;
            dir.dtau += corr.dtau;
            dir.dkappa += corr.dkappa;
        }
        return dir;
    }

    // NT complementarity right-hand side from scaled-space target matrices
    Eigen::VectorXd comp_rhs(const IterState& it, double sigma_mu, const Direction* aff) {
        Eigen::VectorXd r4 = Eigen::VectorXd::Zero(d_.cone.dim);
        for (std::size_t k = 0; k < d_.cone.psd.size(); ++k) {
            int n = d_.cone.psd[k], off = d_.cone.psd_off[k];
            const auto& sc = scal_[k];
            Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
            D.diagonal() = sigma_mu - sc.lam.cwiseProduct(sc.lam).array();
            if (aff) {
                Eigen::MatrixXd dxh = sc.Rinv * smat(aff->dx, off, n) * sc.Rinv.transpose();
                Eigen::MatrixXd dsh = sc.R.transpose() * smat(aff->ds, off, n) * sc.R;
                D -= 0.5 * (dxh * dsh + dsh * dxh);
            }
            // Lyapunov solve Diag(lam) o U = D
            Eigen::MatrixXd U(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) U(i, j) = 2.0 * D(i, j) / (sc.lam[i] + sc.lam[j]);
            Eigen::MatrixXd res = sc.R * U * sc.R.transpose();
            svec_into(res, r4, off);
        }
        for (int i = 0; i < d_.cone.lp_size; ++i) {
            int k = d_.cone.lp_off + i;
            double corr = aff ? aff->dx[k] * aff->ds[k] : 0.0;
            r4[k] = (sigma_mu - it.x[k] * it.s[k] - corr) / it.s[k];
        }
        return r4;
    }

    const ConicData& d_;
    SolveOptions opts_;
    std::vector<BlockScaling> scal_;
    std::vector<double> lp_w2_;
    std::vector<std::vector<std::pair<int, std::vector<std::pair<int, double>>>>> block_rows_;

public:
    IterState state_;
    double pres_ = 0, dres_ = 0, relgap_ = 0, certres_ = 0;
    int iters_ = 0;
    SdpStatus status_ = SdpStatus::MaxIterations;
};

SdpSolution HsdSolver::run() {
    const ConicData& d = d_;
    int p = static_cast<int>(d.A.rows());
    IterState it;
    it.x = Eigen::VectorXd::Zero(d.cone.dim);
    it.s = Eigen::VectorXd::Zero(d.cone.dim);
    for (std::size_t k = 0; k < d.cone.psd.size(); ++k) {
        int n = d.cone.psd[k], off = d.cone.psd_off[k];
        for (int i = 0; i < n; ++i) {
            it.x[off + svec_index(n, i, i)] = 1.0;
            it.s[off + svec_index(n, i, i)] = 1.0;
        }
    }
    for (int i = 0; i < d.cone.lp_size; ++i) {
        it.x[d.cone.lp_off + i] = 1.0;
        it.s[d.cone.lp_off + i] = 1.0;
    }
    it.z = Eigen::VectorXd::Zero(p);
    it.tau = it.kappa = 1.0;

    double scale_b = 1.0 + d.b.norm(), scale_c = 1.0 + d.c.norm();
    double degree = d.cone.degree + 1;
    SdpStatus status = SdpStatus::MaxIterations;
    double certres = 0.0;
    int iter = 0;
    IterState best_it = it;
    double best_score = 1e300, best_pres = 0, best_dres = 0, best_gap = 0;

    for (; iter < opts_.max_iter; ++iter) {
        // residuals of the self-dual system
        Eigen::VectorXd res_p = d.A * it.x - d.b * it.tau;
        Eigen::VectorXd res_d = d.A.transpose() * it.z + it.s - d.c * it.tau;
        double res_g = d.b.dot(it.z) - d.c.dot(it.x) - it.kappa;
        double mu = (it.x.dot(it.s) + it.tau * it.kappa) / degree;

        double pres = (d.A * it.x / it.tau - d.b).norm() / scale_b;
        double dres = (d.A.transpose() * it.z / it.tau + it.s / it.tau - d.c).norm() / scale_c;
        double pobj = d.c.dot(it.x) / it.tau, dobj = d.b.dot(it.z) / it.tau;
        double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        relgap_ = relgap;

        // feasibility measured relative to the iterate as well: when the
        // optimal y is huge the absolute residual cannot drop below
        // eps_mach * |y|, which every solver accepts as optimal; guarded by
        // kappa << tau so a genuine infeasibility ray is never taken
        double ynorm = it.z.lpNorm<Eigen::Infinity>() / it.tau;
        double pres_rel = pres * scale_b / (scale_b + ynorm);
        double dres_rel = dres * scale_c / (scale_c + ynorm);
        bool tau_ok = it.kappa <= 1e-6 * it.tau;
        pres_ = tau_ok ? std::min(pres, pres_rel) : pres;
        dres_ = tau_ok ? std::min(dres, dres_rel) : dres;
        double score = std::max({pres_, dres_, relgap});
        if (score < best_score) {
            best_score = score;
            best_it = it;
            best_pres = pres_;
            best_dres = dres_;
            best_gap = relgap;
        }
        if ((pres <= opts_.tol && dres <= opts_.tol && relgap <= opts_.tol) ||
            (tau_ok && pres_rel <= opts_.tol && dres_rel <= opts_.tol && relgap <= opts_.tol)) {
            status = SdpStatus::Optimal;
            break;
        }
        double bz = d.b.dot(it.z), cx = -d.c.dot(it.x);
        double pinf_res = bz > 0 ? (d.A.transpose() * it.z + it.s).norm() / bz / scale_c : 1e300;
        double dinf_res = cx > 0 ? (d.A * it.x).norm() / cx / scale_b : 1e300;
        if (pinf_res <= opts_.tol) {
            status = SdpStatus::DualInfeasible; // no Gram-side point exists
            certres = pinf_res;
            break;
        }
        if (dinf_res <= opts_.tol) {
            status = SdpStatus::PrimalInfeasible; // no y satisfies the LMI
            certres = dinf_res;
            break;
        }
        if (it.tau <= 1e-10 * std::max(1.0, it.kappa) || mu <= 1e-15) {
            // complementarity has bottomed out; take a reduced-accuracy
            // optimum if the iterate is essentially feasible, otherwise
            // classify by the better infeasibility certificate
            double loose = std::sqrt(opts_.tol);
            if (tau_ok && pres_rel <= loose && dres_rel <= loose && relgap <= loose) {
                status = SdpStatus::Optimal;
                break;
            }
            if (pinf_res <= loose && pinf_res <= dinf_res) {
                status = SdpStatus::DualInfeasible;
                certres = pinf_res;
            } else if (dinf_res <= loose) {
                status = SdpStatus::PrimalInfeasible;
                certres = dinf_res;
            } else {
                status = SdpStatus::NumericalFailure;
            }
            break;
        }

        if (!update_scalings(it)) {
            status = SdpStatus::NumericalFailure;
            break;
        }
        int m = d.cone.free_count;
        SchurFactor schur;
        schur.K = Eigen::MatrixXd::Zero(p + m, p + m);
        schur.K.topLeftCorner(p, p) = build_schur();
        for (int j = 0; j < m; ++j) {
            int col = d.cone.free_off + j;
            for (int r = 0; r < p; ++r) {
                double v = d.A.coeff(r, col);
                schur.K(r, p + j) = v;
                schur.K(p + j, r) = v;
            }
        }
        {
            // quasi-definite regularization keeps the pivots away from zero
            double reg = 1e-12 * (1.0 + schur.K.diagonal().head(p).maxCoeff());
            Eigen::MatrixXd Kr = schur.K;
            Kr.diagonal().head(p).array() += reg;
            Kr.diagonal().tail(m).array() -= reg;
            schur.lu.compute(Kr);
        }
        Eigen::VectorXd Wc = apply_W(d.c);
        Eigen::VectorXd rhs2(p + m);
        rhs2.head(p) = d.A * Wc + d.b;
        rhs2.tail(m) = d.c.segment(d.cone.free_off, m);
        Eigen::VectorXd u2 = schur.solve(rhs2);
        double cWc = d.c.dot(Wc);

        // predictor
        Eigen::VectorXd r4aff = comp_rhs(it, 0.0, nullptr);
        Direction aff = solve_refined(it, schur, -res_p, -res_d, -res_g, r4aff,
                                     -it.tau * it.kappa, Wc, u2, cWc);
        double axs = std::min(max_step(it.x, aff.dx), max_step(it.s, aff.ds));
        double at = aff.dtau < 0 ? -it.tau / aff.dtau : 1e300;
        double ak = aff.dkappa < 0 ? -it.kappa / aff.dkappa : 1e300;
        double alpha_aff = std::min({1.0, axs, at, ak});
        double mu_aff = ((it.x + alpha_aff * aff.dx).dot(it.s + alpha_aff * aff.ds) +
                         (it.tau + alpha_aff * aff.dtau) * (it.kappa + alpha_aff * aff.dkappa)) /
                        degree;
        double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
        sigma = std::min(1.0, sigma);

        // corrector
        Eigen::VectorXd r4 = comp_rhs(it, sigma * mu, &aff);
        double r5 = sigma * mu - it.tau * it.kappa - aff.dtau * aff.dkappa;
        double eta = 1.0 - sigma;
        Direction dir = solve_refined(it, schur, -eta * res_p, -eta * res_d, -eta * res_g, r4, r5,
                                     Wc, u2, cWc);

        auto step_of = [&](const Direction& dd) {
            double sxs = std::min(max_step(it.x, dd.dx), max_step(it.s, dd.ds));
            double st = dd.dtau < 0 ? -it.tau / dd.dtau : 1e300;
            double sk = dd.dkappa < 0 ? -it.kappa / dd.dkappa : 1e300;
            return std::min(0.98 * std::min({sxs, st, sk}), 1.0);
        };
        double alpha = step_of(dir);
        if (alpha < 0.1 * alpha_aff) {
            // the second-order term overshot the boundary; fall back to a
            // plain centering step, which is slower but never worse than the
            // predictor
            double sig2 = std::max(sigma, 0.5);
            Eigen::VectorXd r4c = comp_rhs(it, sig2 * mu, nullptr);
            double r5c = sig2 * mu - it.tau * it.kappa;
            double eta2 = 1.0 - sig2;
            Direction ctr = solve_refined(it, schur, -eta2 * res_p, -eta2 * res_d, -eta2 * res_g,
                                          r4c, r5c, Wc, u2, cWc);
            double alpha_ctr = step_of(ctr);
            if (alpha_ctr > alpha) {
                dir = ctr;
                alpha = alpha_ctr;
            }
        }
        if (alpha < 1e-10) {
            status = SdpStatus::NumericalFailure;
            break;
        }
        it.x += alpha * dir.dx;
        it.s += alpha * dir.ds;
        it.z += alpha * dir.dz;
        it.tau += alpha * dir.dtau;
        it.kappa += alpha * dir.dkappa;
    }

    // the line search or the Newton system can break down right after the
    // iterate has effectively reached the optimum; fall back to the best
    // iterate seen when it already meets a modestly relaxed tolerance
    if ((status == SdpStatus::NumericalFailure || status == SdpStatus::MaxIterations) &&
        best_score <= 10 * opts_.tol) {
        status = SdpStatus::Optimal;
        it = best_it;
        pres_ = best_pres;
        dres_ = best_dres;
        relgap_ = best_gap;
    }

    state_ = it;
    iters_ = iter;
    status_ = status;
    certres_ = certres;

    SdpSolution sol;
    sol.status = status;
    sol.iterations = iter;
    sol.primal_residual = pres_;
    sol.dual_residual = dres_;
    sol.gap = relgap_;
    sol.certificate_violation = certres_;
    return sol;
}

} // namespace

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts) {
    ConicData d = build_conic(p);
    equilibrate(d);
    HsdSolver solver(d, opts);
    SdpSolution sol = solver.run();

    const IterState& st = solver.state_;
    double tau = st.tau > 0 ? st.tau : 1.0;
    bool scaled = sol.status == SdpStatus::Optimal || sol.status == SdpStatus::MaxIterations;
    double div = scaled ? tau : 1.0;

    // undo the equilibration: x = E x', z = D z'
    Eigen::VectorXd xs = st.x, zs = st.z;
    if (d.col_scale.size() > 0) {
        xs.array() *= d.col_scale.array();
        zs.array() *= d.row_scale.array();
    }

    sol.y = zs / div;
    sol.objective = p.b.size() > 0 ? p.b.dot(sol.y) : 0.0;

    // map cone variable back to LMI-dual blocks and free duals
    int psd_i = 0, lp_off_in_cone = d.cone.lp_off, lp_used = 0;
    for (int bs : p.blocks) {
        if (bs > 0) {
            sol.dual_blocks.push_back(smat(xs / div, d.cone.psd_off[static_cast<std::size_t>(psd_i)], bs));
            ++psd_i;
        } else {
            Eigen::MatrixXd D = Eigen::MatrixXd::Zero(-bs, -bs);
            for (int i = 0; i < -bs; ++i) D(i, i) = xs[lp_off_in_cone + lp_used + i] / div;
            sol.dual_blocks.push_back(D);
            lp_used += -bs;
        }
    }
    sol.free_duals = Eigen::VectorXd::Zero(p.free_vars);
    for (int j = 0; j < p.free_vars; ++j)
        sol.free_duals[j] = xs[d.cone.free_off + j] / div;
    sol.message = to_string(sol.status);
    return sol;
}

double verify_infeasibility_certificate(const SdpProblem& p, const SdpSolution& s) {
    ConicData d = build_conic(p);
    if (s.status == SdpStatus::DualInfeasible) {
        // ray z with -A^T z in K*, b_c^T z > 0 (no Gram-side point)
        Eigen::VectorXd z = s.y; // unnormalized conic multiplier direction
        double bz = d.b.dot(z);
        if (bz <= 0) return 1e300;
        Eigen::VectorXd slack = -d.A.transpose() * z;
        // distance of slack from K: check PSD blocks and LP nonnegativity
        double viol = 0.0;
        for (std::size_t k = 0; k < d.cone.psd.size(); ++k) {
            Eigen::MatrixXd M = smat(slack, d.cone.psd_off[k], d.cone.psd[k]);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
            viol = std::max(viol, -es.eigenvalues().minCoeff());
        }
        for (int i = 0; i < d.cone.lp_size; ++i)
            viol = std::max(viol, -slack[d.cone.lp_off + i]);
        // free coordinates must hit zero exactly (dual of the free cone)
        for (int j = 0; j < d.cone.free_count; ++j)
            viol = std::max(viol, std::abs(slack[d.cone.free_off + j]));
        return std::max(0.0, viol) / bz;
    }
    if (s.status == SdpStatus::PrimalInfeasible) {
        // ray x in K with A x ~= 0 and <c,x> < 0 (no y satisfies the LMI)
        return s.certificate_violation;
    }
    return 0.0;
}

} // namespace sosmat
