#include "sosmat/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <Eigen/SparseCholesky>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sosmat {

bool Certificate::exact() const {
    for (const auto& b : blocks)
        if (!b.gram_exact) return false;
    return lambda.size() == 0 || lambda_exact.has_value();
}

namespace {

std::string offender_label(const std::pair<int, int>& ij, const MultiIndex& mi) {
    std::ostringstream os;
    os << "entry (" << ij.first << "," << ij.second << ") monomial [";
    for (std::size_t k = 0; k < mi.size(); ++k) os << (k ? "," : "") << mi[k];
    os << "]";
    return os.str();
}

// Least-norm correction of the Gram entries and lambda so the coefficient
// matching constraints hold to working precision. Interior-point accuracy is
// relative to the iterate norm, which can leave an absolute constraint
// residual far above machine precision when the multipliers are large; the
// projection removes it while moving the Grams by no more than the residual.
void polish(const SdpProblem& p, SdpSolution& sol) {
    std::map<std::tuple<int, int, int>, int> col_of; // (block, i<=j) -> column
    auto col = [&](int blk, int i, int j) {
        auto key = std::make_tuple(blk, std::min(i, j), std::max(i, j));
        auto [it, fresh] = col_of.try_emplace(key, static_cast<int>(col_of.size()));
        return it->second;
    };
    int ell = p.var_count();
    std::vector<Eigen::Triplet<double>> trips;
    for (int t = 0; t < ell; ++t)
        for (const auto& f : p.F[static_cast<std::size_t>(t)])
            trips.emplace_back(t, col(f.block, f.row, f.col), f.row == f.col ? f.value : 2.0 * f.value);
    int nx = static_cast<int>(col_of.size());
    for (int t = 0; t < ell; ++t)
        for (int l = 0; l < p.free_vars; ++l)
            if (p.G(t, l) != 0.0) trips.emplace_back(t, nx + l, -p.G(t, l));
    Eigen::SparseMatrix<double> J(ell, nx + p.free_vars);
    J.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseMatrix<double> N = (J * Eigen::SparseMatrix<double>(J.transpose())).pruned();
    double reg = 0.0;
    for (int t = 0; t < ell; ++t) reg = std::max(reg, N.coeff(t, t));
    reg = 1e-13 * (1.0 + reg);
    for (int t = 0; t < ell; ++t) N.coeffRef(t, t) += reg;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(N);
    if (ldlt.info() != Eigen::Success) return;

    // alternating projections between the affine constraints and the PSD
    // cone, ending on the PSD side: the certificate must be exactly PSD while
    // a small leftover coefficient residual is measured against a tolerance
    for (int round = 0; round < 20; ++round) {
        Eigen::VectorXd r = p.b + p.G * sol.free_duals;
        for (int t = 0; t < ell; ++t)
            for (const auto& f : p.F[static_cast<std::size_t>(t)]) {
                double x = sol.dual_blocks[static_cast<std::size_t>(f.block)](f.row, f.col);
                r[t] -= f.value * (f.row == f.col ? x : 2.0 * x);
            }
        Eigen::VectorXd delta = J.transpose() * ldlt.solve(r);
        for (const auto& [key, c] : col_of) {
            auto [blk, i, j] = key;
            auto& X = sol.dual_blocks[static_cast<std::size_t>(blk)];
            X(i, j) += delta[c];
            if (i != j) X(j, i) += delta[c];
        }
        for (int l = 0; l < p.free_vars; ++l) sol.free_duals[l] += delta[nx + l];
        double moved = 0.0;
        for (auto& X : sol.dual_blocks) {
            if (X.rows() == 0) continue;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (X + X.transpose()));
            Eigen::VectorXd ev = es.eigenvalues();
            double neg = ev.minCoeff();
            if (neg >= 0.0) continue;
            moved = std::min(moved, neg);
            ev = ev.cwiseMax(0.0);
            X = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        }
        if (moved > -1e-14 && delta.norm() < 1e-12) break;
    }
}

} // namespace

ResidualReport verify_certificate(const ParamPolyMatrix& P, const Certificate& cert, double tol) {
    int m = P.size(), n = P.var_count();
    bool exact = cert.exact();

    PolyMatrix target;
    if (exact && cert.lambda_exact) {
        target = P.base;
        if (cert.lambda_exact->size() != P.directions.size())
            throw std::invalid_argument("verify_certificate: lambda length mismatch");
        for (std::size_t i = 0; i < P.directions.size(); ++i)
            target = target + (*cert.lambda_exact)[i] * P.directions[i];
    } else if (cert.lambda.size() > 0) {
        if (cert.lambda.size() != static_cast<Eigen::Index>(P.directions.size()))
            throw std::invalid_argument("verify_certificate: lambda length mismatch");
        target = P.at(cert.lambda);
    } else {
        if (!P.directions.empty())
            throw std::invalid_argument("verify_certificate: certificate lacks lambda");
        target = P.base;
    }
    target = cert.sigma * target;

    PolyMatrix recon(m, n);
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& b : cert.blocks) {
        GramBlockSpec spec{b.clique, b.weight, b.basis};
        PolyMatrix term = exact ? gram_to_polymatrix_exact(*b.gram_exact, spec, m)
                                : gram_to_polymatrix(b.gram, spec, m);
        recon = recon + term;
        Eigen::MatrixXd G = b.gram_exact ? rat_to_dense(*b.gram_exact) : b.gram;
        if (G.rows() > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()),
                                                              Eigen::EigenvaluesOnly);
            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        }
        if (exact && !rat_is_psd(*b.gram_exact)) min_eig = std::min(min_eig, -2.0 * tol - 1.0);
    }
    if (!std::isfinite(min_eig)) min_eig = 0.0;

    // backward-error scale: the difference is measured against the magnitude
    // of the quantities actually subtracted, not just the target
    double scale = 1.0;
    for (const auto& [ij, p] : target.entries())
        for (const auto& [mi, c] : p.terms()) scale = std::max(scale, 1.0 + std::abs(to_double(c)));
    for (const auto& [ij, p] : recon.entries())
        for (const auto& [mi, c] : p.terms()) scale = std::max(scale, 1.0 + std::abs(to_double(c)));

    PolyMatrix diff = recon - target;
    ResidualReport rep;
    rep.min_gram_eig = min_eig;
    for (const auto& [ij, p] : diff.entries())
        for (const auto& [mi, c] : p.terms()) {
            double r = std::abs(to_double(c)) / scale;
            if (r > rep.max_coeff_residual) {
                rep.max_coeff_residual = r;
                rep.worst = offender_label(ij, mi);
            }
        }
    if (exact && diff.is_zero()) rep.max_coeff_residual = 0.0;
    rep.pass = rep.max_coeff_residual <= tol && rep.min_gram_eig >= -tol;
    return rep;
}

ResidualReport verify_certificate(const PolyMatrix& P, const Certificate& cert, double tol) {
    ParamPolyMatrix pm;
    pm.base = P;
    return verify_certificate(pm, cert, tol);
}

Certificate recover_certificate(const SosProgram& prog, const SdpSolution& sol, double tol) {
    if (sol.status != SdpStatus::Optimal)
        throw std::runtime_error("recover_certificate: solution is not optimal (" +
                                 to_string(sol.status) + ")");
    Certificate cert;
    cert.sigma = prog.sigma;
    SdpSolution pol = sol;
    polish(prog.sdp, pol);
    cert.lambda = pol.free_duals;
    for (std::size_t s = 0; s < prog.gram_blocks.size(); ++s) {
        const auto& spec = prog.gram_blocks[s];
        Eigen::MatrixXd Q = recover_gram(prog, pol, static_cast<int>(s));
        Q = 0.5 * (Q + Q.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
        Eigen::VectorXd ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev[i] < 0.0) {
                if (ev[i] < -tol)
                    throw std::runtime_error("recover_certificate: Gram matrix not PSD within tol");
                ev[i] = 0.0;
            }
        Q = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        cert.blocks.push_back({spec.clique, spec.weight, spec.basis, Q, std::nullopt});
    }
    return cert;
}

Certificate certificate_from_polya(const PolyMatrix& P, const PolyaReport& rep) {
    int n = P.var_count();
    Certificate cert;
    Polynomial sq(n);
    for (int i = 0; i < n; ++i) sq += Polynomial::variable(n, i, 2);
    cert.sigma = sq.pow(rep.nu);

    MonomialBasis basis;
    basis.n = n;
    for (const auto& [alpha, blocks] : rep.splits) {
        MultiIndex half(alpha.size());
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            if (alpha[i] % 2 != 0) throw std::invalid_argument("certificate_from_polya: odd monomial");
            half[i] = alpha[i] / 2;
        }
        basis.monomials.push_back(half);
    }
    int B = basis.size();
    Polynomial one = Polynomial::constant(n, 1);

    for (std::size_t k = 0; k < rep.cliques.size(); ++k) {
        const auto& c = rep.cliques[k];
        int r = c.size(), dim = r * B;
        RatMatrix Q(static_cast<std::size_t>(dim), std::vector<Rational>(static_cast<std::size_t>(dim), 0));
        int a = 0;
        for (const auto& [alpha, blocks] : rep.splits) {
            const RatMatrix& C = blocks[k];
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    Q[static_cast<std::size_t>(i * B + a)][static_cast<std::size_t>(j * B + a)] =
                        C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            ++a;
        }
        CertBlock blk{c, one, basis, rat_to_dense(Q), std::move(Q)};
        cert.blocks.push_back(std::move(blk));
    }
    return cert;
}

namespace {

bool in_region(const std::vector<double>& x, const std::vector<std::pair<double, double>>& box,
               const std::vector<Polynomial>& constraints) {
    for (std::size_t i = 0; i < box.size(); ++i)
        if (x[i] < box[i].first || x[i] > box[i].second) return false;
    for (const auto& g : constraints)
        if (g.eval(x) < 0.0) return false;
    return true;
}

double min_eig_at(const PolyMatrix& P, const std::vector<double>& x) {
    Eigen::MatrixXd M = P.eval(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace

SampleResult sample_min_eig(const PolyMatrix& P, const std::vector<std::pair<double, double>>& box,
                            const std::vector<Polynomial>& constraints, int samples, unsigned seed) {
    int n = P.var_count();
    if (static_cast<int>(box.size()) != n)
        throw std::invalid_argument("sample_min_eig: box dimension mismatch");
    constexpr int kChunks = 64;
    struct Local {
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> arg;
        long accepted = 0;
    };
    std::vector<Local> locals(kChunks);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int chunk = 0; chunk < kChunks; ++chunk) {
        int count = samples / kChunks + (chunk < samples % kChunks ? 1 : 0);
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed) * 1000003u + static_cast<unsigned>(chunk));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::vector<double> x(static_cast<std::size_t>(n));
        Local& loc = locals[static_cast<std::size_t>(chunk)];
        for (int s = 0; s < count; ++s) {
            for (int i = 0; i < n; ++i)
                x[static_cast<std::size_t>(i)] =
                    box[static_cast<std::size_t>(i)].first +
                    uni(rng) * (box[static_cast<std::size_t>(i)].second -
                                box[static_cast<std::size_t>(i)].first);
            bool ok = true;
            for (const auto& g : constraints)
                if (g.eval(x) < 0.0) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            ++loc.accepted;
            double e = min_eig_at(P, x);
            if (e < loc.best) {
                loc.best = e;
                loc.arg = x;
            }
        }
    }

    SampleResult res;
    long accepted = 0;
    res.min_eig = std::numeric_limits<double>::infinity();
    for (const auto& loc : locals) {
        accepted += loc.accepted;
        if (loc.best < res.min_eig) {
            res.min_eig = loc.best;
            res.argmin = loc.arg;
        }
    }
    if (accepted == 0) throw std::runtime_error("sample_min_eig: no samples satisfied the constraints");

    // coordinate-descent polish
    std::vector<double> x = res.argmin;
    std::vector<double> trial = x;
    double best = res.min_eig;
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        h[static_cast<std::size_t>(i)] =
            0.1 * (box[static_cast<std::size_t>(i)].second - box[static_cast<std::size_t>(i)].first);
    for (int step = 0; step < 200; ++step) {
        bool improved = false;
        for (int i = 0; i < n; ++i) {
            for (double dir : {1.0, -1.0}) {
                trial = x;
                trial[static_cast<std::size_t>(i)] += dir * h[static_cast<std::size_t>(i)];
                if (!in_region(trial, box, constraints)) continue;
                double e = min_eig_at(P, trial);
                if (e < best) {
                    best = e;
                    x = trial;
                    improved = true;
                }
            }
        }
        if (!improved)
            for (double& hi : h) hi *= 0.5;
    }
    res.min_eig = best;
    res.argmin = x;
    return res;
}

} // namespace sosmat
