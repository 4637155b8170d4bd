#include "sosmat/polymatrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace sosmat {

PolyMatrix PolyMatrix::identity(int m, int n) {
    PolyMatrix I(m, n);
    for (int i = 1; i <= m; ++i) I.set_entry(i, i, Polynomial::constant(n, 1));
    return I;
}

void PolyMatrix::check_index(int i, int j) const {
    if (i < 1 || j < 1 || i > m_ || j > m_) throw std::out_of_range("matrix index out of range");
}

Polynomial PolyMatrix::entry(int i, int j) const {
    check_index(i, j);
    if (i > j) std::swap(i, j);
    auto it = entries_.find({i, j});
    return it == entries_.end() ? Polynomial(n_) : it->second;
}

void PolyMatrix::set_entry(int i, int j, const Polynomial& p) {
    check_index(i, j);
    if (p.var_count() != n_) throw std::invalid_argument("variable count mismatch");
    if (i > j) std::swap(i, j);
    if (p.is_zero())
        entries_.erase({i, j});
    else
        entries_[{i, j}] = p;
}

void PolyMatrix::add_to_entry(int i, int j, const Polynomial& p) {
    set_entry(i, j, entry(i, j) + p);
}

bool PolyMatrix::is_structural_zero(int i, int j) const {
    check_index(i, j);
    if (i > j) std::swap(i, j);
    return entries_.find({i, j}) == entries_.end();
}

SparsityGraph PolyMatrix::sparsity_graph() const {
    SparsityGraph g(m_);
    for (const auto& [ij, p] : entries_)
        if (ij.first != ij.second) g.add_edge(ij.first, ij.second);
    return g;
}

Eigen::MatrixXd PolyMatrix::eval(std::span<const double> x) const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m_, m_);
    for (const auto& [ij, p] : entries_) {
        double v = p.eval(x);
        M(ij.first - 1, ij.second - 1) = v;
        M(ij.second - 1, ij.first - 1) = v;
    }
    return M;
}

PolyMatrix PolyMatrix::operator+(const PolyMatrix& o) const {
    if (m_ != o.m_ || n_ != o.n_) throw std::invalid_argument("dimension mismatch");
    PolyMatrix r = *this;
    for (const auto& [ij, p] : o.entries_) r.add_to_entry(ij.first, ij.second, p);
    return r;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& o) const {
    if (m_ != o.m_ || n_ != o.n_) throw std::invalid_argument("dimension mismatch");
    PolyMatrix r = *this;
    for (const auto& [ij, p] : o.entries_) r.add_to_entry(ij.first, ij.second, -p);
    return r;
}

PolyMatrix operator*(const Polynomial& s, const PolyMatrix& P) {
    if (s.var_count() != P.n_) throw std::invalid_argument("variable count mismatch");
    PolyMatrix r(P.m_, P.n_);
    for (const auto& [ij, p] : P.entries_) r.set_entry(ij.first, ij.second, s * p);
    return r;
}

PolyMatrix operator*(const Rational& c, const PolyMatrix& P) {
    PolyMatrix r(P.m_, P.n_);
    for (const auto& [ij, p] : P.entries_) r.set_entry(ij.first, ij.second, c * p);
    return r;
}

PolyMatrix::StructureFlags PolyMatrix::structure_flags() const {
    StructureFlags f{true, 0, true};
    bool first = true;
    for (const auto& [ij, p] : entries_) {
        if (!p.is_even()) f.even = false;
        unsigned d = 0;
        if (!p.is_homogeneous(&d)) {
            f.homogeneous = false;
        } else if (first) {
            f.degree = d;
            first = false;
        } else if (f.homogeneous && d != f.degree) {
            f.homogeneous = false;
        }
    }
    if (!f.homogeneous) f.degree = 0;
    return f;
}

unsigned PolyMatrix::degree() const {
    unsigned d = 0;
    for (const auto& [ij, p] : entries_) d = std::max(d, p.degree());
    return d;
}

std::map<MultiIndex, RatMatrix, GradedLexLess> polya_expand(const PolyMatrix& P, unsigned nu) {
    int n = P.var_count(), m = P.size();
    Polynomial sigma(n);
    for (int i = 0; i < n; ++i) sigma += Polynomial::variable(n, i, 2);
    Polynomial w = sigma.pow(nu);
    std::map<MultiIndex, RatMatrix, GradedLexLess> out;
    for (const auto& [ij, p] : P.entries()) {
        Polynomial q = w * p;
        for (const auto& [mi, c] : q.terms()) {
            auto it = out.find(mi);
            if (it == out.end())
                it = out.emplace(mi, RatMatrix(static_cast<std::size_t>(m),
                                               std::vector<Rational>(static_cast<std::size_t>(m), 0)))
                         .first;
            it->second[static_cast<std::size_t>(ij.first - 1)][static_cast<std::size_t>(ij.second - 1)] = c;
            it->second[static_cast<std::size_t>(ij.second - 1)][static_cast<std::size_t>(ij.first - 1)] = c;
        }
    }
    return out;
}

PolyMatrix even_substitute(const PolyMatrix& P) {
    PolyMatrix r(P.size(), P.var_count());
    for (const auto& [ij, p] : P.entries()) {
        if (!p.is_even()) throw std::invalid_argument("even_substitute: matrix is not even");
        r.set_entry(ij.first, ij.second, p.halve_exponents());
    }
    return r;
}

Polynomial scalarize(const PolyMatrix& P) {
    int n = P.var_count(), m = P.size();
    Polynomial out(n + m);
    for (const auto& [ij, p] : P.entries()) {
        Polynomial term = p.extend_vars(n + m);
        Polynomial yi = Polynomial::variable(n + m, n + ij.first - 1);
        Polynomial yj = Polynomial::variable(n + m, n + ij.second - 1);
        Polynomial prod = term * yi * yj;
        out += ij.first == ij.second ? prod : Rational(2) * prod;
    }
    return out;
}

Eigen::MatrixXi csp_matrix(const Polynomial& p, const std::vector<int>& y_vars) {
    int m = static_cast<int>(y_vars.size());
    for (int v : y_vars)
        if (v < 1 || v > p.var_count()) throw std::out_of_range("variable index out of range");
    Eigen::MatrixXi C = Eigen::MatrixXi::Identity(m, m);
    for (const auto& [mi, c] : p.terms())
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                if (mi[static_cast<std::size_t>(y_vars[static_cast<std::size_t>(a)] - 1)] > 0 &&
                    mi[static_cast<std::size_t>(y_vars[static_cast<std::size_t>(b)] - 1)] > 0)
                    C(a, b) = C(b, a) = 1;
    return C;
}

Polynomial homogenize_quadratic(const Polynomial& p, const std::vector<int>& y_vars) {
    int n = p.var_count();
    Polynomial q(n + 1); // z is variable n+1
    for (const auto& [mi, c] : p.terms()) {
        unsigned dy = 0;
        for (int v : y_vars) dy += mi[static_cast<std::size_t>(v - 1)];
        if (dy > 2) throw std::invalid_argument("homogenize_quadratic: degree in y exceeds 2");
        MultiIndex e(static_cast<std::size_t>(n + 1));
        for (std::size_t i = 0; i < mi.size(); ++i) e[i] = mi[i];
        e[static_cast<std::size_t>(n)] = 2 - dy;
        q.add_term(e, c);
    }
    return q;
}

std::pair<PolyMatrix, PolyMatrix> schmudgen_step(const PolyMatrix& P) {
    int m = P.size(), n = P.var_count();
    if (m < 2) throw std::invalid_argument("schmudgen_step: need m >= 2");
    Polynomial u = P.entry(1, 1);
    PolyMatrix Z(m, n), Q(m, n);
    Z.set_entry(1, 1, u);
    // Z is lower triangular; stored symmetrically but only (i,1) and (i,i) are used
    for (int i = 2; i <= m; ++i) {
        Z.set_entry(i, 1, P.entry(i, 1));
        Z.set_entry(i, i, u);
    }
    Q.set_entry(1, 1, u * u * u);
    for (int i = 2; i <= m; ++i)
        for (int j = i; j <= m; ++j)
            Q.set_entry(i, j, u * u * P.entry(i, j) - u * P.entry(i, 1) * P.entry(j, 1));
    return {Z, Q};
}

PolyMatrix DiagonalizationResult::permuted(const PolyMatrix& P) const {
    int m = P.size();
    PolyMatrix out(m, P.var_count());
    for (int i = 1; i <= m; ++i)
        for (int j = i; j <= m; ++j)
            out.set_entry(i, j, P.entry(permutation[static_cast<std::size_t>(i - 1)],
                                        permutation[static_cast<std::size_t>(j - 1)]));
    return out;
}

namespace {

// Recursion over (P, G) with sparsity(P) contained in chordal G; G is carried
// explicitly because exact cancellation in P' may drop edges mid-recursion.
DiagonalizationResult diagonalize_rec(const PolyMatrix& P, const SparsityGraph& G) {
    int m = P.size(), n = P.var_count();
    DiagonalizationResult res;
    if (m == 1) {
        res.permutation = {1};
        res.b = Polynomial::constant(n, 1);
        res.L = PolyMatrix::identity(1, n);
        res.diag = {P.entry(1, 1)};
        return res;
    }

    auto simp = simplicial_vertices(G);
    int pivot = -1;
    for (int v : simp)
        if (!P.entry(v, v).is_zero()) {
            pivot = v;
            break;
        }
    if (pivot < 0) throw std::runtime_error("sparse_ldl_diagonalize: no simplicial vertex with nonzero diagonal pivot");

    Polynomial a = P.entry(pivot, pivot);
    std::vector<int> rest;
    for (int v = 1; v <= m; ++v)
        if (v != pivot) rest.push_back(v);

    bool zero_row = true;
    for (int v : rest)
        if (!P.entry(pivot, v).is_zero()) {
            zero_row = false;
            break;
        }

    // Subproblem matrix on the remaining vertices, relabeled to 1..m-1.
    PolyMatrix sub(m - 1, n);
    if (zero_row) {
        for (int i = 0; i < m - 1; ++i)
            for (int j = i; j < m - 1; ++j)
                sub.set_entry(i + 1, j + 1,
                              P.entry(rest[static_cast<std::size_t>(i)], rest[static_cast<std::size_t>(j)]));
    } else {
        // Schur complement with the common factor a divided out; the missing
        // power is restored on the inner diagonal below, which keeps the
        // degree growth of the recursion additive instead of multiplicative
        for (int i = 0; i < m - 1; ++i)
            for (int j = i; j < m - 1; ++j) {
                int vi = rest[static_cast<std::size_t>(i)], vj = rest[static_cast<std::size_t>(j)];
                sub.set_entry(i + 1, j + 1,
                              a * P.entry(vi, vj) - P.entry(pivot, vi) * P.entry(pivot, vj));
            }
    }
    SparsityGraph subG = remove_vertex(G, pivot);
    // eliminating a simplicial vertex creates no fill, so subG stays chordal
    DiagonalizationResult inner = diagonalize_rec(sub, subG);

    res.permutation.resize(static_cast<std::size_t>(m));
    res.permutation[0] = pivot;
    for (int i = 0; i < m - 1; ++i)
        res.permutation[static_cast<std::size_t>(i + 1)] =
            rest[static_cast<std::size_t>(inner.permutation[static_cast<std::size_t>(i)] - 1)];

    const Polynomial& s = inner.b;
    Polynomial s4 = s * s * s * s;
    res.L = PolyMatrix(m, n);
    res.diag.resize(static_cast<std::size_t>(m));
    if (zero_row) {
        res.b = s;
        res.L.set_entry(1, 1, Polynomial::constant(n, 1));
        res.diag[0] = s4 * a;
        for (int i = 1; i < m; ++i)
            for (int j = 1; j <= i; ++j)
                res.L.set_entry(i + 1, j + 1, inner.L.entry(i, j));
    } else {
        res.b = s * a;
        res.L.set_entry(1, 1, a);
        res.diag[0] = s4 * a * a * a;
        for (int i = 1; i < m; ++i) {
            // column below the pivot: permuted q entries
            res.L.set_entry(i + 1, 1, P.entry(pivot, res.permutation[static_cast<std::size_t>(i)]));
            for (int j = 1; j <= i; ++j)
                res.L.set_entry(i + 1, j + 1, a * inner.L.entry(i, j));
        }
        for (int i = 1; i < m; ++i)
            res.diag[static_cast<std::size_t>(i)] = a * inner.diag[static_cast<std::size_t>(i - 1)];
        return res;
    }
    for (int i = 1; i < m; ++i) res.diag[static_cast<std::size_t>(i)] = inner.diag[static_cast<std::size_t>(i - 1)];
    return res;
}

} // namespace

DiagonalizationResult sparse_ldl_diagonalize(const PolyMatrix& P) {
    auto g = P.sparsity_graph();
    if (!is_chordal(g)) throw std::invalid_argument("sparse_ldl_diagonalize: sparsity graph is not chordal");
    return diagonalize_rec(P, g);
}

} // namespace sosmat
