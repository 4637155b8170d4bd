#pragma once

#include <string>
#include <vector>

#include "sosmat/polymatrix.hpp"
#include "sosmat/sdp.hpp"

namespace sosmat {

struct MonomialBasis {
    int n = 0;
    std::vector<MultiIndex> monomials; // graded-lex, duplicate-free
    int size() const { return static_cast<int>(monomials.size()); }
};

/// All monomials of degree <= d in n variables, graded-lex.
MonomialBasis monomial_basis(int n, int d);
/// All monomials of degree exactly d.
MonomialBasis homogeneous_basis(int n, int d);

/// One SOS matrix S(x) = (I_r (x) v(x))^T Q (I_r (x) v(x)) scaled by `weight`
/// and inflated into the ambient matrix along `clique`. Kronecker layout:
/// Gram row (i, a) = i * |basis| + a for local matrix row i and basis index a.
struct GramBlockSpec {
    Clique clique;
    Polynomial weight;
    MonomialBasis basis;
    int rows() const { return clique.size(); }
    int block_size() const { return rows() * basis.size(); }
};

/// Realize the polynomial matrix of a Gram block inside an m x m ambient matrix.
PolyMatrix gram_to_polymatrix(const Eigen::MatrixXd& G, const GramBlockSpec& spec, int m);
PolyMatrix gram_to_polymatrix_exact(const RatMatrix& G, const GramBlockSpec& spec, int m);

/// P(x, lambda) = base + sum_i lambda_i * directions[i]; minimize objective . lambda.
struct ParamPolyMatrix {
    PolyMatrix base;
    std::vector<PolyMatrix> directions;
    Eigen::VectorXd objective; // empty = feasibility

    int size() const { return base.size(); }
    int var_count() const { return base.var_count(); }
    int param_count() const { return static_cast<int>(directions.size()); }
    PolyMatrix at(const Eigen::VectorXd& lambda) const;
};

/// SDP plus the recovery map back to Gram matrices. Each GramBlockSpec owns one
/// or more SDP blocks (split by exponent parity when the target is even).
struct SosProgram {
    SdpProblem sdp;
    std::vector<GramBlockSpec> gram_blocks;
    // members[s][c] = Kronecker indices of SDP block sdp_blocks[s][c]
    std::vector<std::vector<int>> sdp_blocks;
    std::vector<std::vector<std::vector<int>>> members;
    Polynomial sigma;                // multiplier on the P side
    Eigen::VectorXd objective;       // over lambda, minimized
    int ambient = 0;                 // m
    int params = 0;                  // number of lambda variables
    bool structurally_infeasible = false;
    std::string infeasibility_note;
};

SosProgram build_dense(const ParamPolyMatrix& P, const std::vector<Polynomial>& weights, int d);
SosProgram build_basic_sparse(const ParamPolyMatrix& P, const std::vector<Clique>& cliques, int d);
SosProgram build_weighted_sparse(const ParamPolyMatrix& P, const Polynomial& sigma,
                                 const std::vector<Clique>& cliques, int d);
SosProgram build_even_hierarchy(const ParamPolyMatrix& P, unsigned nu);
SosProgram build_even_hierarchy(const ParamPolyMatrix& P, unsigned nu,
                                const std::vector<Clique>& cliques);
SosProgram build_sparse_putinar(const ParamPolyMatrix& P, const std::vector<Polynomial>& weights,
                                const std::vector<Clique>& cliques, int d);

/// Reassemble the full Gram matrix of gram_blocks[spec_index] from a solution.
Eigen::MatrixXd recover_gram(const SosProgram& prog, const SdpSolution& sol, int spec_index);

} // namespace sosmat
