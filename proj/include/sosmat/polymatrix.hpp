#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "sosmat/graph.hpp"
#include "sosmat/polynomial.hpp"

namespace sosmat {

/// Symmetric m x m polynomial matrix; stores the upper triangle only and
/// drops entries that cancel to the exact zero polynomial.
class PolyMatrix {
public:
    PolyMatrix() : m_(0), n_(0) {}
    PolyMatrix(int m, int n) : m_(m), n_(n) {}

    static PolyMatrix identity(int m, int n);
    static PolyMatrix zero(int m, int n) { return PolyMatrix(m, n); }

    int size() const { return m_; }
    int var_count() const { return n_; }
    const std::map<std::pair<int, int>, Polynomial>& entries() const { return entries_; }

    /// 1-based indices; mirrors the upper triangle.
    Polynomial entry(int i, int j) const;
    void set_entry(int i, int j, const Polynomial& p);
    void add_to_entry(int i, int j, const Polynomial& p);
    bool is_structural_zero(int i, int j) const;

    SparsityGraph sparsity_graph() const;

    Eigen::MatrixXd eval(std::span<const double> x) const;

    PolyMatrix operator+(const PolyMatrix& o) const;
    PolyMatrix operator-(const PolyMatrix& o) const;
    friend PolyMatrix operator*(const Polynomial& s, const PolyMatrix& P);
    friend PolyMatrix operator*(const Rational& c, const PolyMatrix& P);

    bool operator==(const PolyMatrix& o) const {
        return m_ == o.m_ && n_ == o.n_ && entries_ == o.entries_;
    }

    struct StructureFlags {
        bool homogeneous;
        unsigned degree; // meaningful when homogeneous
        bool even;
    };
    StructureFlags structure_flags() const;

    unsigned degree() const;
    bool is_zero() const { return entries_.empty(); }

private:
    void check_index(int i, int j) const;

    int m_, n_;
    std::map<std::pair<int, int>, Polynomial> entries_; // i <= j
};

using RatMatrix = std::vector<std::vector<Rational>>;

/// Coefficient matrices C_alpha of (x1^2+...+xn^2)^nu * P.
std::map<MultiIndex, RatMatrix, GradedLexLess> polya_expand(const PolyMatrix& P, unsigned nu);

/// Halve every exponent; requires an even matrix.
PolyMatrix even_substitute(const PolyMatrix& P);

/// y^T P(x) y over n+m variables (x first, then y).
Polynomial scalarize(const PolyMatrix& P);

/// 0/1 coupling matrix of p with respect to the listed variables (1-based).
Eigen::MatrixXi csp_matrix(const Polynomial& p, const std::vector<int>& y_vars);

/// z^2 * p(x, y/z); z is appended as the last variable.
Polynomial homogenize_quadratic(const Polynomial& p, const std::vector<int>& y_vars);

/// Schmudgen elimination of the scalar (1,1) block: u^4 P = Z Q Z^T.
std::pair<PolyMatrix, PolyMatrix> schmudgen_step(const PolyMatrix& P);

struct DiagonalizationResult {
    std::vector<int> permutation; // row i of T picks vertex permutation[i] (1-based)
    Polynomial b;
    PolyMatrix L;
    std::vector<Polynomial> diag;

    PolyMatrix permuted(const PolyMatrix& P) const; // T P T^T
};

/// Recursive no-fill factorization b^4 T P T^T = L Diag(d) L^T for chordal sparsity.
DiagonalizationResult sparse_ldl_diagonalize(const PolyMatrix& P);

} // namespace sosmat
