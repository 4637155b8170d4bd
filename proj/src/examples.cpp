#include "sosmat/examples.hpp"

namespace sosmat {
namespace examples {

namespace {

Polynomial mono(int n, std::vector<unsigned> e, const Rational& c) {
    Polynomial p(n);
    p.add_term(MultiIndex(std::move(e)), c);
    return p;
}

Polynomial poly(int n, std::initializer_list<std::pair<std::vector<unsigned>, Rational>> terms) {
    Polynomial p(n);
    for (const auto& [e, c] : terms) p.add_term(MultiIndex(e), c);
    return p;
}

RatMatrix rank_sum(int dim, const std::vector<std::vector<std::pair<int, Rational>>>& cols) {
    RatMatrix Q(static_cast<std::size_t>(dim), std::vector<Rational>(static_cast<std::size_t>(dim), 0));
    for (const auto& col : cols)
        for (const auto& [i, ci] : col)
            for (const auto& [j, cj] : col)
                Q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += ci * cj;
    return Q;
}

CertBlock make_block(Clique clique, Polynomial weight, MonomialBasis basis, RatMatrix Q) {
    CertBlock b{std::move(clique), std::move(weight), std::move(basis), rat_to_dense(Q),
                std::move(Q)};
    return b;
}

std::vector<Clique> chain_cliques(int m) {
    std::vector<Clique> cs;
    for (int i = 1; i < m; ++i) cs.push_back({{i, i + 1}});
    return cs;
}

} // namespace

Instance ex31(const Rational& k) {
    Instance inst;
    inst.name = "ex3.1";
    PolyMatrix P(3, 1);
    P.set_entry(1, 1, poly(1, {{{0}, k + 1}, {{2}, 1}}));
    P.set_entry(1, 2, poly(1, {{{1}, 1}, {{2}, 1}}));
    P.set_entry(2, 2, poly(1, {{{0}, k}, {{2}, 2}}));
    P.set_entry(2, 3, poly(1, {{{1}, 1}, {{2}, -1}}));
    P.set_entry(3, 3, poly(1, {{{0}, k + 1}, {{2}, 1}}));
    inst.pm.base = P;
    inst.cliques = chain_cliques(3);
    return inst;
}

Instance ex32() {
    Instance inst;
    inst.name = "ex3.2";
    PolyMatrix P(3, 3);
    P.set_entry(1, 1, poly(3, {{{2, 0, 0}, 1}, {{0, 2, 0}, 1}}));
    P.set_entry(1, 2, mono(3, {1, 1, 0}, -1));
    P.set_entry(2, 2, poly(3, {{{0, 2, 0}, 1}, {{0, 0, 2}, 1}}));
    P.set_entry(2, 3, mono(3, {0, 1, 1}, -1));
    P.set_entry(3, 3, poly(3, {{{2, 0, 0}, 1}, {{0, 0, 2}, 1}}));
    inst.pm.base = P;
    inst.cliques = chain_cliques(3);
    return inst;
}

Instance ex33() {
    Instance inst;
    inst.name = "ex3.3";
    PolyMatrix P(3, 2);
    Polynomial corner = poly(2, {{{4, 0}, 1}, {{2, 2}, 1}, {{0, 4}, 1}});
    Polynomial cross = mono(2, {2, 2}, 1);
    P.set_entry(1, 1, corner);
    P.set_entry(1, 2, cross);
    P.set_entry(2, 2, poly(2, {{{4, 0}, 1}, {{0, 4}, 1}}));
    P.set_entry(2, 3, cross);
    P.set_entry(3, 3, corner);
    inst.pm.base = P;
    inst.cliques = chain_cliques(3);
    return inst;
}

Instance ex34() {
    Instance inst;
    inst.name = "ex3.4";
    PolyMatrix P(3, 2);
    P.set_entry(1, 1, poly(2, {{{0, 0}, 1}, {{2, 0}, 2}, {{4, 0}, -1}}));
    P.set_entry(1, 2, poly(2, {{{1, 0}, 1}, {{1, 1}, 1}, {{3, 0}, -1}}));
    P.set_entry(2, 2, poly(2, {{{0, 0}, 3}, {{2, 0}, 4}, {{0, 2}, -3}}));
    P.set_entry(2, 3, poly(2, {{{2, 1}, 2}, {{1, 1}, -1}, {{0, 3}, -2}}));
    P.set_entry(3, 3, poly(2, {{{0, 0}, 1}, {{0, 2}, 1}, {{2, 2}, 1}, {{0, 4}, -1}}));
    inst.pm.base = P;
    inst.weights = {poly(2, {{{0, 0}, 1}, {{2, 0}, -1}}),
                    poly(2, {{{2, 0}, 1}, {{0, 2}, -1}})};
    inst.cliques = chain_cliques(3);
    inst.box = {{-1.0, 1.0}, {-1.0, 1.0}};
    return inst;
}

Instance ex35(int omega) {
    if (omega < 1) throw std::invalid_argument("ex35: omega must be >= 1");
    int m = 3 * omega;
    Instance inst;
    inst.name = "ex3.5";
    PolyMatrix P0(m, 3), P1(m, 3), P2(m, 3);
    auto x4 = [](int v) { // x_{v+1}^4, v 0-based mod 3
        std::vector<unsigned> e(3, 0);
        e[static_cast<std::size_t>(v % 3)] = 4;
        return MultiIndex(e);
    };
    auto x22 = [](int v) { // x_{v+1}^2 x_{v+2}^2
        std::vector<unsigned> e(3, 0);
        e[static_cast<std::size_t>(v % 3)] = 2;
        e[static_cast<std::size_t>((v + 1) % 3)] = 2;
        return MultiIndex(e);
    };
    for (int j = 1; j <= m; ++j) {
        int u = (j - 1) % 3;
        Polynomial d0(3), d2(3);
        d0.add_term(x4(u + 1), 1);
        d2.add_term(x4(u), 1);
        P0.set_entry(j, j, d0);
        P2.set_entry(j, j, d2);
        if (j < m) {
            Polynomial off(3);
            off.add_term(x22(u), 1);
            (j % 2 == 1 ? P1 : P2).set_entry(j, j + 1, off);
        }
    }
    inst.pm.base = P0;
    inst.pm.directions = {P1, P2};
    inst.pm.objective = Eigen::Vector2d(-10.0, 1.0); // minimize lambda2 - 10*lambda1
    inst.cliques = chain_cliques(m);
    return inst;
}

Instance ex36(int m) {
    if (m < 2) throw std::invalid_argument("ex36: m must be >= 2");
    Instance inst;
    inst.name = "ex3.6";
    PolyMatrix P(m, 2);
    Polynomial diag = poly(2, {{{0, 0}, 10}, {{0, 3}, 1}, {{4, 0}, -1}});
    Polynomial arrow = poly(2, {{{1, 0}, 1}, {{1, 1}, 1}, {{3, 0}, -1}});
    for (int i = 1; i <= m; ++i) P.set_entry(i, i, diag);
    for (int j = 2; j <= m; ++j) P.set_entry(1, j, arrow);
    inst.pm.base = P;
    inst.pm.directions = {Rational(-1) * PolyMatrix::identity(m, 2)};
    inst.pm.objective = Eigen::VectorXd::Constant(1, -1.0); // maximize lambda
    inst.weights = {poly(2, {{{0, 0}, 1}, {{2, 0}, -1}}),
                    poly(2, {{{2, 0}, 1}, {{0, 2}, -1}})};
    for (int k = 1; k < m; ++k) inst.cliques.push_back({{1, k + 1}});
    inst.box = {{-1.0, 1.0}, {-1.0, 1.0}};
    return inst;
}

PolyMatrix remark_polya_matrix() {
    PolyMatrix P(3, 2);
    Polynomial corner = poly(2, {{{0, 4}, 1}, {{2, 2}, 1}});
    Polynomial cross = mono(2, {2, 2}, 1);
    P.set_entry(1, 1, corner);
    P.set_entry(1, 2, cross);
    P.set_entry(2, 2, mono(2, {4, 0}, 2));
    P.set_entry(2, 3, cross);
    P.set_entry(3, 3, corner);
    return P;
}

Eigen::MatrixXd forced_dense_gram() {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(9, 9);
    auto set = [&](int i, int j, double v) { Q(i, j) = Q(j, i) = v; };
    set(0, 0, 1);
    set(1, 1, 1);
    set(4, 4, 1);
    set(5, 5, 1);
    set(6, 6, 1);
    set(8, 8, 1);
    set(0, 4, -1); // coefficient matching forces the cross terms
    set(4, 8, -1);
    return Q;
}

Certificate ex32_hand_certificate() {
    Certificate cert;
    cert.sigma = poly(3, {{{2, 0, 0}, 1}, {{0, 2, 0}, 1}});
    MonomialBasis basis = homogeneous_basis(3, 2); // x1^2, x1x2, x1x3, x2^2, x2x3, x3^2
    Polynomial one = Polynomial::constant(3, 1);
    cert.blocks.push_back(make_block(
        {{1, 2}}, one, basis, rank_sum(12, {{{0, 1}, {3, 1}, {7, -1}}})));
    cert.blocks.push_back(make_block(
        {{2, 3}}, one, basis,
        rank_sum(12, {{{2, 1}}, {{4, 1}, {6, -1}}, {{3, 1}, {10, -1}}, {{7, 1}}, {{8, 1}}})));
    return cert;
}

Certificate ex33_hand_certificate_nu0() {
    Certificate cert;
    cert.sigma = Polynomial::constant(2, 1);
    MonomialBasis basis = homogeneous_basis(2, 2); // x1^2, x1x2, x2^2
    Polynomial one = Polynomial::constant(2, 1);
    cert.blocks.push_back(make_block(
        {{1, 2}}, one, basis, rank_sum(6, {{{0, 1}, {5, 1}}, {{1, 1}}, {{2, 1}}})));
    cert.blocks.push_back(make_block(
        {{2, 3}}, one, basis, rank_sum(6, {{{0, 1}, {5, 1}}, {{4, 1}}, {{3, 1}}})));
    return cert;
}

Certificate ex33_hand_certificate_nu1() {
    PolyaReport rep;
    rep.nu = 1;
    rep.exact = true;
    rep.cliques = {{{1, 2}}, {{2, 3}}};
    Rational h(1, 2);
    RatMatrix a1{{1, 0}, {0, h}}, a2{{h, 0}, {0, 1}};
    RatMatrix b1{{2, 1}, {1, h}}, b2{{h, 1}, {1, 2}};
    rep.splits.emplace(MultiIndex({6, 0}), std::vector<RatMatrix>{a1, a2});
    rep.splits.emplace(MultiIndex({4, 2}), std::vector<RatMatrix>{b1, b2});
    rep.splits.emplace(MultiIndex({2, 4}), std::vector<RatMatrix>{b1, b2});
    rep.splits.emplace(MultiIndex({0, 6}), std::vector<RatMatrix>{a1, a2});
    return certificate_from_polya(ex33().pm.base, rep);
}

Certificate ex34_hand_certificate() {
    Certificate cert;
    cert.sigma = Polynomial::constant(2, 1);
    MonomialBasis basis = monomial_basis(2, 1); // 1, x1, x2
    Polynomial one = Polynomial::constant(2, 1);
    Polynomial g1 = poly(2, {{{0, 0}, 1}, {{2, 0}, -1}});
    Polynomial g2 = poly(2, {{{2, 0}, 1}, {{0, 2}, -1}});
    cert.blocks.push_back(make_block(
        {{1, 2}}, one, basis, rank_sum(6, {{{0, 1}}, {{3, 1}}, {{1, 1}, {5, 1}}})));
    cert.blocks.push_back(make_block(
        {{2, 3}}, one, basis, rank_sum(6, {{{0, 1}}, {{3, 1}}, {{1, 1}, {5, -1}}})));
    cert.blocks.push_back(make_block({{1, 2}}, g1, basis, rank_sum(6, {{{1, 1}, {3, 1}}})));
    cert.blocks.push_back(make_block({{2, 3}}, g2, basis, rank_sum(6, {{{0, 2}, {5, 1}}})));
    return cert;
}

} // namespace examples
} // namespace sosmat
