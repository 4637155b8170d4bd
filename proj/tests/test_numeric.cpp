#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sosmat/examples.hpp"
#include "sosmat/numeric.hpp"

using namespace sosmat;

namespace {

Eigen::MatrixXd chain_matrix() {
    Eigen::MatrixXd M(3, 3);
    M << 4, 2, 0, 2, 2, 2, 0, 2, 4;
    return M;
}

Eigen::MatrixXd reconstruct(const CliqueSplit& split, int m) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t k = 0; k < split.cliques.size(); ++k) {
        const auto& vs = split.cliques[k].vertices;
        for (std::size_t a = 0; a < vs.size(); ++a)
            for (std::size_t b = 0; b < vs.size(); ++b)
                M(vs[a] - 1, vs[b] - 1) += split.blocks[k](static_cast<Eigen::Index>(a),
                                                           static_cast<Eigen::Index>(b));
    }
    return M;
}

} // namespace

TEST_CASE("psd_check") {
    auto r = psd_check(chain_matrix());
    CHECK(r.psd);
    CHECK(r.min_eig >= -1e-12);

    auto q = psd_check(examples::forced_dense_gram());
    CHECK(!q.psd);
    CHECK(q.min_eig == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-9));

    auto ni = psd_check(-Eigen::Matrix3d::Identity());
    CHECK(!ni.psd);
    CHECK(ni.min_eig == doctest::Approx(-1.0));
}

TEST_CASE("agler decomposition of the chain matrix") {
    std::vector<Clique> cliques = {{{1, 2}}, {{2, 3}}};
    auto split = agler_decompose(chain_matrix(), cliques);
    REQUIRE(split.blocks.size() == 2);
    Eigen::Matrix2d X1, X2;
    X1 << 4, 2, 2, 1;
    X2 << 1, 2, 2, 4;
    CHECK((split.blocks[0] - X1).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((split.blocks[1] - X2).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("agler decomposition of the identity") {
    std::vector<Clique> cliques = {{{1, 2}}, {{2, 3}}};
    auto split = agler_decompose(Eigen::Matrix3d::Identity(), cliques);
    Eigen::Matrix2d X1, X2;
    X1 << 1, 0, 0, 1;
    X2 << 0, 0, 0, 1;
    CHECK((split.blocks[0] - X1).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((split.blocks[1] - X2).cwiseAbs().maxCoeff() <= 1e-9);

    auto zero = agler_decompose(Eigen::Matrix3d::Zero(), cliques);
    for (const auto& B : zero.blocks) CHECK(B.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("agler rejects bad inputs") {
    std::vector<Clique> cliques = {{{1, 2}}, {{2, 3}}};
    CHECK_THROWS(agler_decompose(-Eigen::MatrixXd::Identity(3, 3), cliques));
    Eigen::MatrixXd dense = Eigen::MatrixXd::Identity(3, 3);
    dense(0, 2) = dense(2, 0) = 0.5; // support outside the chain cover
    CHECK_THROWS(agler_decompose(dense, cliques));
}

TEST_CASE("agler reconstruction on 500 random sparse PSD matrices") {
    std::mt19937 rng(303);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        int m = 2 + static_cast<int>(rng() % 19);
        SparsityGraph g(m);
        for (int i = 1; i <= m; ++i)
            for (int j = i + 1; j <= m; ++j)
                if (rng() % 4 == 0) g.add_edge(i, j);
        auto [ext, peo] = chordal_extension(g);
        auto cliques = maximal_cliques(ext, peo);

        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
        for (const auto& c : cliques) {
            int s = c.size();
            Eigen::MatrixXd R(s, s);
            for (Eigen::Index a = 0; a < s; ++a)
                for (Eigen::Index b = 0; b < s; ++b) R(a, b) = gauss(rng);
            Eigen::MatrixXd X = R * R.transpose();
            for (int a = 0; a < s; ++a)
                for (int b = 0; b < s; ++b)
                    M(c.vertices[static_cast<std::size_t>(a)] - 1,
                      c.vertices[static_cast<std::size_t>(b)] - 1) += X(a, b);
        }
        auto split = agler_decompose(M, cliques);
        double scale = 1.0 + M.cwiseAbs().maxCoeff();
        CHECK((reconstruct(split, m) - M).cwiseAbs().maxCoeff() <= 1e-9 * scale);
        for (const auto& B : split.blocks) CHECK(psd_check(B, 1e-8).psd);
    }
}

TEST_CASE("exact agler split") {
    RatMatrix M = {{4, 2, 0}, {2, 2, 2}, {0, 2, 4}};
    std::vector<Clique> cliques = {{{1, 2}}, {{2, 3}}};
    auto split = agler_decompose_exact(M, cliques);
    REQUIRE(split.has_value());
    RatMatrix sum(3, std::vector<Rational>(3, 0));
    for (std::size_t k = 0; k < cliques.size(); ++k) {
        REQUIRE(rat_is_psd((*split)[k]));
        const auto& vs = cliques[k].vertices;
        for (std::size_t a = 0; a < vs.size(); ++a)
            for (std::size_t b = 0; b < vs.size(); ++b)
                sum[static_cast<std::size_t>(vs[a] - 1)][static_cast<std::size_t>(vs[b] - 1)] +=
                    (*split)[k][a][b];
    }
    CHECK(sum == M);

    RatMatrix neg = {{-1, 0}, {0, -1}};
    CHECK(!agler_decompose_exact(neg, {{{1, 2}}}).has_value());
}

TEST_CASE("polya exponent search") {
    auto rep = polya_exponent_search(examples::ex33().pm.base, 3);
    REQUIRE(rep.has_value());
    CHECK(rep->nu == 1);
    CHECK(!rep->splits.empty());

    CHECK(!polya_exponent_search(examples::remark_polya_matrix(), 10).has_value());

    // (x1^2 + x2^2) * I2 already has PSD coefficients
    Polynomial s(2);
    s += Polynomial::variable(2, 0, 2);
    s += Polynomial::variable(2, 1, 2);
    auto triv = polya_exponent_search(s * PolyMatrix::identity(2, 2), 3);
    REQUIRE(triv.has_value());
    CHECK(triv->nu == 0);
}

TEST_CASE("polya monotonicity and split reconstruction") {
    auto P = examples::ex33().pm.base;
    auto rep = polya_exponent_search(P, 3);
    REQUIRE(rep.has_value());
    // nu succeeded, so forcing a larger expansion must also have PSD coefficients
    auto coeffs = polya_expand(P, rep->nu + 1);
    for (const auto& [alpha, C] : coeffs) CHECK(psd_check(rat_to_dense(C), 1e-8).psd);

    // exact splits reassemble the expansion coefficient-wise
    REQUIRE(rep->exact);
    auto expanded = polya_expand(P, rep->nu);
    int m = P.size();
    for (const auto& [alpha, blocks] : rep->splits) {
        auto it = expanded.find(alpha);
        REQUIRE(it != expanded.end());
        RatMatrix sum(static_cast<std::size_t>(m), std::vector<Rational>(static_cast<std::size_t>(m), 0));
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const auto& vs = rep->cliques[k].vertices;
            for (std::size_t a = 0; a < vs.size(); ++a)
                for (std::size_t b = 0; b < vs.size(); ++b)
                    sum[static_cast<std::size_t>(vs[a] - 1)][static_cast<std::size_t>(vs[b] - 1)] +=
                        blocks[k][a][b];
        }
        CHECK(sum == it->second);
    }
}
