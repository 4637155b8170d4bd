#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "sosmat/polymatrix.hpp"

namespace sosmat {

struct PsdReport {
    bool psd;
    double min_eig;
};

/// Minimum eigenvalue via symmetric eigensolver; psd iff min_eig >= -tol.
PsdReport psd_check(const Eigen::MatrixXd& M, double tol = 1e-8);

struct CliqueSplit {
    std::vector<Clique> cliques;
    std::vector<Eigen::MatrixXd> blocks; // blocks[k] has size |cliques[k]|
};

/// Split a chordally sparse PSD matrix into per-clique PSD blocks via a
/// no-fill LDL^T in a perfect elimination ordering.
CliqueSplit agler_decompose(const Eigen::MatrixXd& M, const std::vector<Clique>& cliques,
                            double tol = 1e-8);

/// Exact-rational variant; empty result when M is not PSD.
std::optional<std::vector<RatMatrix>> agler_decompose_exact(const RatMatrix& M,
                                                            const std::vector<Clique>& cliques);

struct PolyaReport {
    unsigned nu;
    bool exact; // splits computed in rational arithmetic
    std::vector<Clique> cliques;
    // per monomial alpha of (sum x_i^2)^nu * P: one rational block per clique
    std::map<MultiIndex, std::vector<RatMatrix>, GradedLexLess> splits;
};

/// Smallest nu <= nu_max making every coefficient matrix of
/// (x1^2+...+xn^2)^nu * P positive semidefinite, with per-coefficient splits.
std::optional<PolyaReport> polya_exponent_search(const PolyMatrix& P, unsigned nu_max,
                                                 double tol = 1e-8);

// rational helpers shared with the certificate layer
bool rat_is_psd(const RatMatrix& M);
Eigen::MatrixXd rat_to_dense(const RatMatrix& M);

} // namespace sosmat
