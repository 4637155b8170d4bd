#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sosmat/examples.hpp"
#include "sosmat/polymatrix.hpp"

using namespace sosmat;

namespace {

Polynomial poly(int n, std::initializer_list<std::pair<std::vector<unsigned>, Rational>> terms) {
    Polynomial p(n);
    for (const auto& [e, c] : terms) p.add_term(MultiIndex(e), c);
    return p;
}

Polynomial random_poly(std::mt19937& rng, int n, int max_deg) {
    Polynomial p(n);
    int terms = 1 + static_cast<int>(rng() % 6);
    for (int t = 0; t < terms; ++t) {
        MultiIndex mi(static_cast<std::size_t>(n));
        int budget = static_cast<int>(rng() % static_cast<unsigned>(max_deg + 1));
        for (int b = 0; b < budget; ++b) mi[rng() % static_cast<unsigned>(n)] += 1;
        p.add_term(mi, Rational(static_cast<int>(rng() % 9) - 4, 1 + static_cast<int>(rng() % 3)));
    }
    return p;
}

// L is lower triangular (stored in a symmetric container; only i >= k entries count)
Polynomial ldl_entry(const DiagonalizationResult& r, int i, int j) {
    int m = static_cast<int>(r.diag.size());
    int n = r.b.var_count();
    Polynomial acc(n);
    for (int k = 1; k <= std::min(i, j); ++k)
        acc += r.L.entry(i, k) * r.diag[static_cast<std::size_t>(k - 1)] * r.L.entry(j, k);
    (void)m;
    return acc;
}

void check_diagonalization(const PolyMatrix& P) {
    auto r = sparse_ldl_diagonalize(P);
    PolyMatrix TPT = r.permuted(P);
    Polynomial b4 = r.b * r.b * r.b * r.b;
    for (int i = 1; i <= P.size(); ++i)
        for (int j = i; j <= P.size(); ++j)
            CHECK(b4 * TPT.entry(i, j) == ldl_entry(r, i, j));
    // no fill-in: L + L^T has the sparsity of T P T^T
    auto g = TPT.sparsity_graph();
    for (int i = 2; i <= P.size(); ++i)
        for (int k = 1; k < i; ++k)
            if (!r.L.entry(i, k).is_zero()) CHECK(g.has_edge(k, i));
}

} // namespace

TEST_CASE("polynomial evaluation") {
    Polynomial p = poly(2, {{{2, 0}, 1}, {{0, 2}, 1}});
    double x[] = {1.0, 2.0};
    CHECK(p.eval(x) == doctest::Approx(5.0));

    auto M = examples::ex32().pm.base.eval(std::vector<double>{1, 1, 1});
    Eigen::Matrix3d expect;
    expect << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    CHECK((M - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("basic arithmetic") {
    Polynomial x = Polynomial::variable(1, 0);
    Polynomial one = Polynomial::constant(1, 1);
    CHECK((x + one) * (x - one) == poly(1, {{{2}, 1}, {{0}, -1}}));

    PolyMatrix Z = Rational(0) * examples::ex32().pm.base;
    CHECK(Z.is_zero());
}

TEST_CASE("ring laws on random polynomials") {
    std::mt19937 rng(101);
    for (int trial = 0; trial < 500; ++trial) {
        int n = 1 + static_cast<int>(rng() % 4);
        Polynomial a = random_poly(rng, n, 6), b = random_poly(rng, n, 6), c = random_poly(rng, n, 6);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
    }
}

TEST_CASE("structure flags") {
    auto f35 = examples::ex35(1).pm.base.structure_flags();
    CHECK(f35.homogeneous);
    CHECK(f35.degree == 4);
    CHECK(f35.even);

    auto f31 = examples::ex31(1).pm.base.structure_flags();
    CHECK(!f31.homogeneous);
    CHECK(!f31.even);

    auto fz = PolyMatrix::zero(2, 2).structure_flags();
    CHECK(fz.homogeneous);
    CHECK(fz.degree == 0);
    CHECK(fz.even);
}

TEST_CASE("polya expansion coefficients") {
    auto P = examples::ex33().pm.base;
    auto coeffs = polya_expand(P, 1);

    auto dense = [](const RatMatrix& M) { return rat_to_dense(M); };
    auto it = coeffs.find(MultiIndex({6, 0}));
    REQUIRE(it != coeffs.end());
    CHECK((dense(it->second) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);
    it = coeffs.find(MultiIndex({0, 6}));
    REQUIRE(it != coeffs.end());
    CHECK((dense(it->second) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);

    it = coeffs.find(MultiIndex({4, 2}));
    REQUIRE(it != coeffs.end());
    Eigen::Matrix3d expect;
    expect << 2, 1, 0, 1, 1, 1, 0, 1, 2;
    CHECK((dense(it->second) - expect).cwiseAbs().maxCoeff() == 0.0);

    auto remark = polya_expand(examples::remark_polya_matrix(), 2);
    it = remark.find(MultiIndex({2, 6}));
    REQUIRE(it != remark.end());
    expect << 3, 1, 0, 1, 0, 1, 0, 1, 3;
    CHECK((dense(it->second) - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("polya expansion nu=0 and reconstruction") {
    std::mt19937 rng(55);
    for (int trial = 0; trial < 40; ++trial) {
        int m = 1 + static_cast<int>(rng() % 4), n = 1 + static_cast<int>(rng() % 3);
        unsigned nu = rng() % 4;
        unsigned half = 1 + rng() % 2;
        PolyMatrix P(m, n);
        for (int i = 1; i <= m; ++i)
            for (int j = i; j <= m; ++j) {
                // even homogeneous entry of degree 2*half
                Polynomial p(n);
                for (int t = 0; t < 3; ++t) {
                    MultiIndex mi(static_cast<std::size_t>(n));
                    for (unsigned b = 0; b < half; ++b) mi[rng() % static_cast<unsigned>(n)] += 2;
                    p.add_term(mi, Rational(static_cast<int>(rng() % 7) - 3));
                }
                P.set_entry(i, j, p);
            }
        auto coeffs = polya_expand(P, nu);
        Polynomial s(n);
        for (int v = 0; v < n; ++v) s += Polynomial::variable(n, v, 2);
        PolyMatrix target = s.pow(nu) * P;
        PolyMatrix rebuilt(m, n);
        for (const auto& [alpha, C] : coeffs)
            for (int i = 1; i <= m; ++i)
                for (int j = i; j <= m; ++j) {
                    Polynomial t(n);
                    t.add_term(alpha, C[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]);
                    rebuilt.add_to_entry(i, j, t);
                }
        CHECK(rebuilt == target);
    }
}

TEST_CASE("even substitution") {
    PolyMatrix P(1, 1);
    P.set_entry(1, 1, poly(1, {{{4}, 1}}));
    auto Q = even_substitute(P);
    CHECK(Q.entry(1, 1) == poly(1, {{{2}, 1}}));

    auto Q33 = even_substitute(examples::ex33().pm.base);
    CHECK(Q33.entry(1, 1) == poly(2, {{{2, 0}, 1}, {{1, 1}, 1}, {{0, 2}, 1}}));
    // resubstitution round-trip
    PolyMatrix back(3, 2);
    for (const auto& [ij, p] : Q33.entries()) back.set_entry(ij.first, ij.second, p.square_variables());
    CHECK(back == examples::ex33().pm.base);

    PolyMatrix C(2, 2);
    C.set_entry(1, 1, Polynomial::constant(2, 3));
    C.set_entry(2, 2, Polynomial::constant(2, 5));
    CHECK(even_substitute(C) == C);

    PolyMatrix odd(1, 1);
    odd.set_entry(1, 1, poly(1, {{{3}, 1}}));
    CHECK_THROWS(even_substitute(odd));
}

TEST_CASE("scalarization") {
    CHECK(scalarize(PolyMatrix::identity(2, 1)) ==
          poly(3, {{{0, 2, 0}, 1}, {{0, 0, 2}, 1}}));

    // numeric chain matrix [[4,2,0],[2,2,2],[0,2,4]]
    PolyMatrix M(3, 0);
    M.set_entry(1, 1, Polynomial::constant(0, 4));
    M.set_entry(1, 2, Polynomial::constant(0, 2));
    M.set_entry(2, 2, Polynomial::constant(0, 2));
    M.set_entry(2, 3, Polynomial::constant(0, 2));
    M.set_entry(3, 3, Polynomial::constant(0, 4));
    CHECK(scalarize(M) == poly(3, {{{2, 0, 0}, 4}, {{1, 1, 0}, 4}, {{0, 2, 0}, 2},
                                   {{0, 1, 1}, 4}, {{0, 0, 2}, 4}}));

    // chain sparsity: no y1*y3 cross-terms
    Polynomial s = scalarize(examples::ex32().pm.base);
    for (const auto& [mi, c] : s.terms()) CHECK(!(mi[3] > 0 && mi[5] > 0));
}

TEST_CASE("csp matrix") {
    // p = x1^2 x2 y1^2 - x2 y2 y3 + y4^4 over (x1,x2,y1..y4)
    Polynomial p = poly(6, {{{2, 1, 2, 0, 0, 0}, 1}, {{0, 1, 0, 1, 1, 0}, -1}, {{0, 0, 0, 0, 0, 4}, 1}});
    Eigen::MatrixXi C = csp_matrix(p, {3, 4, 5, 6});
    Eigen::MatrixXi expect(4, 4);
    expect << 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1;
    CHECK(C == expect);

    // no y variables anywhere -> identity
    Polynomial q = poly(3, {{{2, 0, 0}, 1}});
    CHECK(csp_matrix(q, {2, 3}) == Eigen::MatrixXi::Identity(2, 2));
}

TEST_CASE("csp of scalarization matches sparsity graph") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        int m = 2 + static_cast<int>(rng() % 4), n = 1 + static_cast<int>(rng() % 2);
        PolyMatrix P(m, n);
        for (int i = 1; i <= m; ++i)
            for (int j = i; j <= m; ++j)
                if (i == j || rng() % 3 == 0) P.set_entry(i, j, random_poly(rng, n, 3));
        std::vector<int> yv;
        for (int k = 0; k < m; ++k) yv.push_back(n + 1 + k);
        Eigen::MatrixXi C = csp_matrix(scalarize(P), yv);
        auto g = P.sparsity_graph();
        for (int i = 1; i <= m; ++i)
            for (int j = i + 1; j <= m; ++j)
                CHECK((C(i - 1, j - 1) == 1) == g.has_edge(i, j));
    }
}

TEST_CASE("quadratic homogenization") {
    // p = y1^2 + y1 + 1 over the single variable y1
    Polynomial p = poly(1, {{{2}, 1}, {{1}, 1}, {{0}, 1}});
    CHECK(homogenize_quadratic(p, {1}) == poly(2, {{{2, 0}, 1}, {{1, 1}, 1}, {{0, 2}, 1}}));

    // p = x1 y1 y2 + y2 over (x1, y1, y2)
    Polynomial q = poly(3, {{{1, 1, 1}, 1}, {{0, 0, 1}, 1}});
    CHECK(homogenize_quadratic(q, {2, 3}) ==
          poly(4, {{{1, 1, 1, 0}, 1}, {{0, 0, 1, 1}, 1}}));

    // homogeneous quadratic stays put (modulo the appended variable)
    Polynomial h = poly(2, {{{2, 0}, 1}, {{1, 1}, 2}});
    CHECK(homogenize_quadratic(h, {1, 2}) == poly(3, {{{2, 0, 0}, 1}, {{1, 1, 0}, 2}}));

    CHECK_THROWS(homogenize_quadratic(poly(1, {{{3}, 1}}), std::vector<int>{1}));
}

TEST_CASE("homogenization sets z=1 back to p") {
    std::mt19937 rng(88);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng() % 3);
        std::vector<int> yv = {n}; // last variable is the quadratic one
        Polynomial p(n);
        for (int t = 0; t < 4; ++t) {
            MultiIndex mi(static_cast<std::size_t>(n));
            for (int b = 0; b < 3; ++b) mi[rng() % static_cast<unsigned>(n - 1)] += 1;
            mi[static_cast<std::size_t>(n - 1)] = rng() % 3; // y-degree <= 2
            p.add_term(mi, Rational(static_cast<int>(rng() % 7) - 3));
        }
        Polynomial q = homogenize_quadratic(p, yv);
        // q is homogeneous of degree 2 in (y, z)
        for (const auto& [mi, c] : q.terms())
            CHECK(mi[static_cast<std::size_t>(n - 1)] + mi[static_cast<std::size_t>(n)] == 2);
        // substituting z = 1 reproduces p
        Polynomial at1(n);
        for (const auto& [mi, c] : q.terms()) {
            std::vector<unsigned> e(mi.exponents().begin(), mi.exponents().end() - 1);
            at1.add_term(MultiIndex(std::move(e)), c);
        }
        CHECK(at1 == p);
    }
}

TEST_CASE("schmudgen elimination step") {
    // diagonal case: v = 0
    PolyMatrix D(2, 1);
    Polynomial u = poly(1, {{{0}, 1}, {{2}, 1}});
    Polynomial w = Polynomial::constant(1, 1);
    D.set_entry(1, 1, u);
    D.set_entry(2, 2, w);
    auto [Zd, Qd] = schmudgen_step(D);
    CHECK(Qd.entry(1, 1) == u * u * u);
    CHECK(Qd.entry(2, 2) == u * u * w);
    CHECK(Zd.entry(2, 1).is_zero());

    // P = [[1+x^2, x],[x, 1]]
    PolyMatrix P(2, 1);
    Polynomial x = Polynomial::variable(1, 0);
    P.set_entry(1, 1, u);
    P.set_entry(1, 2, x);
    P.set_entry(2, 2, w);
    auto [Z, Q] = schmudgen_step(P);
    CHECK(Q.entry(1, 1) == u * u * u);
    CHECK(Q.entry(2, 2) == u * u - u * x * x);
    // u^4 P = Z Q Z^T coefficient-wise (Z lower triangular via (i,1),(i,i))
    Polynomial u4 = u * u * u * u;
    auto zval = [&](int i, int k) {
        if (k == 1) return Z.entry(i, 1);
        return i == k ? Z.entry(i, i) : Polynomial(1);
    };
    for (int i = 1; i <= 2; ++i)
        for (int j = i; j <= 2; ++j) {
            Polynomial acc(1);
            for (int k = 1; k <= 2; ++k)
                for (int l = 1; l <= 2; ++l)
                    if (k == l) acc += zval(i, k) * Q.entry(k, l) * zval(j, l);
            // Q here is diagonal-plus-block; off-diagonal Q entries are zero for m=2
            CHECK(acc == u4 * P.entry(i, j));
        }

    PolyMatrix single(1, 1);
    single.set_entry(1, 1, u);
    CHECK_THROWS(schmudgen_step(single));
}

TEST_CASE("sparse LDL diagonalization basics") {
    PolyMatrix P1(1, 1);
    P1.set_entry(1, 1, poly(1, {{{2}, 1}, {{0}, 2}}));
    auto r1 = sparse_ldl_diagonalize(P1);
    CHECK(r1.permutation == std::vector<int>{1});
    CHECK(r1.b == Polynomial::constant(1, 1));
    CHECK(r1.diag[0] == P1.entry(1, 1));

    PolyMatrix D(3, 1);
    for (int i = 1; i <= 3; ++i) D.set_entry(i, i, poly(1, {{{0}, i}, {{2}, 1}}));
    auto rd = sparse_ldl_diagonalize(D);
    CHECK(rd.b == Polynomial::constant(1, 1));
    for (int i = 0; i < 3; ++i)
        CHECK(rd.diag[static_cast<std::size_t>(i)] ==
              D.entry(rd.permutation[static_cast<std::size_t>(i)], rd.permutation[static_cast<std::size_t>(i)]));

    check_diagonalization(examples::ex31(1).pm.base);
}

TEST_CASE("sparse LDL on 200 random chordal matrices") {
    std::mt19937 rng(202);
    int done = 0;
    while (done < 200) {
        int m = 1 + static_cast<int>(rng() % 5), n = 1 + static_cast<int>(rng() % 2);
        SparsityGraph g(m);
        for (int i = 1; i <= m; ++i)
            for (int j = i + 1; j <= m; ++j)
                if (rng() % 3 == 0) g.add_edge(i, j);
        auto [ext, peo] = chordal_extension(g);
        PolyMatrix P(m, n);
        for (int i = 1; i <= m; ++i) {
            // strictly positive constant keeps every elimination pivot nonzero
            Polynomial d = random_poly(rng, n, 2) * random_poly(rng, n, 0);
            d += Polynomial::constant(n, 1 + static_cast<int>(rng() % 4));
            P.set_entry(i, i, d);
        }
        for (const auto& [i, j] : ext.edges())
            if (rng() % 2 == 0) P.set_entry(i, j, random_poly(rng, n, 2));
        if (!is_chordal(P.sparsity_graph())) continue; // cancellation can break chordality
        try {
            sparse_ldl_diagonalize(P);
        } catch (const std::runtime_error&) {
            continue; // zero pivot at a simplicial vertex; resample
        }
        check_diagonalization(P);
        ++done;
    }
}

TEST_CASE("non-chordal sparsity is rejected") {
    PolyMatrix P(4, 1);
    Polynomial x = Polynomial::variable(1, 0);
    for (int i = 1; i <= 4; ++i) P.set_entry(i, i, Polynomial::constant(1, 2));
    P.set_entry(1, 2, x);
    P.set_entry(2, 3, x);
    P.set_entry(3, 4, x);
    P.set_entry(1, 4, x);
    CHECK_THROWS(sparse_ldl_diagonalize(P));
}
