#include "sosmat/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sosmat {

PsdReport psd_check(const Eigen::MatrixXd& M, double tol) {
    if (M.rows() != M.cols()) throw std::invalid_argument("psd_check: not square");
    double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("psd_check: not symmetric");
    if (M.rows() == 0) return {true, 0.0};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    double mn = es.eigenvalues().minCoeff();
    return {mn >= -tol, mn};
}

namespace {

SparsityGraph clique_union_graph(int m, const std::vector<Clique>& cliques) {
    SparsityGraph g(m);
    for (const auto& c : cliques)
        for (std::size_t a = 0; a < c.vertices.size(); ++a)
            for (std::size_t b = a + 1; b < c.vertices.size(); ++b)
                g.add_edge(c.vertices[a], c.vertices[b]);
    return g;
}

// indices of cliques in lexicographic order of their vertex lists
std::vector<int> lex_clique_order(const std::vector<Clique>& cliques) {
    std::vector<int> idx(cliques.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return cliques[static_cast<std::size_t>(a)] < cliques[static_cast<std::size_t>(b)];
    });
    return idx;
}

int assign_clique(const std::vector<Clique>& cliques, const std::vector<int>& lex_order,
                  const std::vector<int>& support) {
    for (int k : lex_order)
        if (cliques[static_cast<std::size_t>(k)].contains_all(support)) return k;
    return -1;
}

} // namespace

CliqueSplit agler_decompose(const Eigen::MatrixXd& M, const std::vector<Clique>& cliques,
                            double tol) {
    int m = static_cast<int>(M.rows());
    if (M.cols() != m) throw std::invalid_argument("agler_decompose: not square");
    double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("agler_decompose: not symmetric");

    SparsityGraph g = clique_union_graph(m, cliques);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (M(i, j) != 0.0 && !g.has_edge(i + 1, j + 1))
                throw std::invalid_argument("agler_decompose: support not covered by cliques");
    auto peo = is_chordal(g);
    if (!peo) throw std::invalid_argument("agler_decompose: clique cover is not chordal");

    CliqueSplit out;
    out.cliques = cliques;
    for (const auto& c : cliques)
        out.blocks.emplace_back(Eigen::MatrixXd::Zero(c.size(), c.size()));
    auto lex = lex_clique_order(cliques);

    Eigen::MatrixXd A = M;
    std::vector<bool> done(static_cast<std::size_t>(m), false);
    for (int v1 : peo->order) {
        int v = v1 - 1;
        done[static_cast<std::size_t>(v)] = true;
        std::vector<int> support; // 1-based, includes v
        for (int u = 0; u < m; ++u)
            if ((u == v || !done[static_cast<std::size_t>(u)]) && A(u, v) != 0.0) support.push_back(u + 1);
        double d = A(v, v);
        if (d <= tol) {
            if (d < -tol) throw std::runtime_error("agler_decompose: matrix is not PSD (negative pivot)");
            for (int u1 : support)
                if (u1 - 1 != v && std::abs(A(u1 - 1, v)) > tol)
                    throw std::runtime_error("agler_decompose: matrix is not PSD (zero pivot, nonzero row)");
            if (d <= 0.0) continue;
        }
        int k = assign_clique(cliques, lex, support);
        if (k < 0) throw std::runtime_error("agler_decompose: column support not inside any clique");
        const auto& cv = cliques[static_cast<std::size_t>(k)].vertices;
        auto local = [&](int u1) {
            return static_cast<int>(std::lower_bound(cv.begin(), cv.end(), u1) - cv.begin());
        };
        for (std::size_t a = 0; a < support.size(); ++a)
            for (std::size_t b = 0; b < support.size(); ++b)
                out.blocks[static_cast<std::size_t>(k)](local(support[a]), local(support[b])) +=
                    A(support[a] - 1, v) * A(support[b] - 1, v) / d;
        for (int u1 : support)
            for (int w1 : support)
                if (u1 - 1 != v && w1 - 1 != v)
                    A(u1 - 1, w1 - 1) -= A(u1 - 1, v) * A(w1 - 1, v) / d;
    }
    return out;
}

std::optional<std::vector<RatMatrix>> agler_decompose_exact(const RatMatrix& M,
                                                            const std::vector<Clique>& cliques) {
    int m = static_cast<int>(M.size());
    SparsityGraph g = clique_union_graph(m, cliques);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0 && !g.has_edge(i + 1, j + 1))
                throw std::invalid_argument("agler_decompose_exact: support not covered by cliques");
    auto peo = is_chordal(g);
    if (!peo) throw std::invalid_argument("agler_decompose_exact: clique cover is not chordal");

    std::vector<RatMatrix> blocks;
    for (const auto& c : cliques)
        blocks.emplace_back(static_cast<std::size_t>(c.size()),
                            std::vector<Rational>(static_cast<std::size_t>(c.size()), 0));
    auto lex = lex_clique_order(cliques);

    RatMatrix A = M;
    std::vector<bool> done(static_cast<std::size_t>(m), false);
    for (int v1 : peo->order) {
        std::size_t v = static_cast<std::size_t>(v1 - 1);
        done[v] = true;
        std::vector<int> support;
        for (int u = 0; u < m; ++u)
            if ((u == static_cast<int>(v) || !done[static_cast<std::size_t>(u)]) &&
                A[static_cast<std::size_t>(u)][v] != 0)
                support.push_back(u + 1);
        Rational d = A[v][v];
        if (d < 0) return std::nullopt;
        if (d == 0) {
            if (support.size() > 1 || (support.size() == 1 && support[0] != v1)) return std::nullopt;
            continue;
        }
        int k = assign_clique(cliques, lex, support);
        if (k < 0) throw std::runtime_error("agler_decompose_exact: column support not inside any clique");
        const auto& cv = cliques[static_cast<std::size_t>(k)].vertices;
        auto local = [&](int u1) {
            return static_cast<std::size_t>(std::lower_bound(cv.begin(), cv.end(), u1) - cv.begin());
        };
        for (int u1 : support)
            for (int w1 : support)
                blocks[static_cast<std::size_t>(k)][local(u1)][local(w1)] +=
                    A[static_cast<std::size_t>(u1 - 1)][v] * A[static_cast<std::size_t>(w1 - 1)][v] / d;
        for (int u1 : support)
            for (int w1 : support)
                if (u1 != v1 && w1 != v1)
                    A[static_cast<std::size_t>(u1 - 1)][static_cast<std::size_t>(w1 - 1)] -=
                        A[static_cast<std::size_t>(u1 - 1)][v] * A[static_cast<std::size_t>(w1 - 1)][v] / d;
    }
    return blocks;
}

bool rat_is_psd(const RatMatrix& M) {
    RatMatrix A = M;
    std::size_t m = A.size();
    for (std::size_t k = 0; k < m; ++k) {
        Rational d = A[k][k];
        if (d < 0) return false;
        if (d == 0) {
            for (std::size_t j = k + 1; j < m; ++j)
                if (A[k][j] != 0) return false;
            continue;
        }
        for (std::size_t i = k + 1; i < m; ++i)
            for (std::size_t j = k + 1; j < m; ++j)
                A[i][j] -= A[i][k] * A[k][j] / d;
    }
    return true;
}

Eigen::MatrixXd rat_to_dense(const RatMatrix& M) {
    Eigen::MatrixXd D(M.size(), M.empty() ? 0 : M[0].size());
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M[i].size(); ++j)
            D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(M[i][j]);
    return D;
}

std::optional<PolyaReport> polya_exponent_search(const PolyMatrix& P, unsigned nu_max, double tol) {
    int m = P.size();
    auto flags = P.structure_flags();
    if (!flags.even || !flags.homogeneous)
        throw std::invalid_argument("polya_exponent_search: P must be even and homogeneous");

    auto [g, peo] = chordal_extension(P.sparsity_graph());
    auto cliques = maximal_cliques(g, peo);
    bool exact = m <= 8;

    for (unsigned nu = 0; nu <= nu_max; ++nu) {
        auto coeffs = polya_expand(P, nu);
        bool all_psd = true;
        for (const auto& [alpha, C] : coeffs) {
            bool psd = exact ? rat_is_psd(C) : psd_check(rat_to_dense(C), tol).psd;
            if (!psd) {
                all_psd = false;
                break;
            }
        }
        if (!all_psd) continue;

        PolyaReport rep;
        rep.nu = nu;
        rep.exact = exact;
        rep.cliques = cliques;
        for (const auto& [alpha, C] : coeffs) {
            if (exact) {
                auto split = agler_decompose_exact(C, cliques);
                if (!split) return std::nullopt; // cannot happen after rat_is_psd
                rep.splits.emplace(alpha, std::move(*split));
            } else {
                auto split = agler_decompose(rat_to_dense(C), cliques, tol);
                std::vector<RatMatrix> blocks;
                for (const auto& B : split.blocks) {
                    RatMatrix R(static_cast<std::size_t>(B.rows()),
                                std::vector<Rational>(static_cast<std::size_t>(B.cols()), 0));
                    for (Eigen::Index i = 0; i < B.rows(); ++i)
                        for (Eigen::Index j = 0; j < B.cols(); ++j)
                            R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Rational(B(i, j));
                    blocks.push_back(std::move(R));
                }
                rep.splits.emplace(alpha, std::move(blocks));
            }
        }
        return rep;
    }
    return std::nullopt;
}

} // namespace sosmat
