#pragma once

#include <string>
#include <vector>

#include "sosmat/certificate.hpp"
#include "sosmat/sos.hpp"

namespace sosmat {
namespace examples {

struct Instance {
    std::string name;
    ParamPolyMatrix pm;
    std::vector<Polynomial> weights;           // semialgebraic region, empty = global
    std::vector<Clique> cliques;               // natural clique cover
    std::vector<std::pair<double, double>> box; // sampling box when a region is given
};

/// 3x3 univariate tridiagonal family; basic decomposition exists iff k >= 2.
Instance ex31(const Rational& k);
/// 3x3 PSD-but-not-SOS matrix admitting sigma = x1^2 + x2^2 weighted split.
Instance ex32();
/// 3x3 even homogeneous positive definite matrix (Polya exponent 1).
Instance ex33();
/// 3x3 bivariate matrix positive definite on the bow-tie set only.
Instance ex34();
/// 3w x 3w tridiagonal quartic family with parameters lambda; minimizes
/// lambda2 - 10*lambda1 over the SOS-representable set.
Instance ex35(int omega);
/// m x m arrow matrix on the bow-tie set; maximizes lambda with P - lambda*I PSD
/// (objective stored as minimize -lambda).
Instance ex36(int m);

/// Matrix from the remark after the even-decomposition proof: decomposable but
/// with no finite Polya exponent.
PolyMatrix remark_polya_matrix();

/// The Gram matrix forced by coefficient matching for ex32 over basis (x1,x2,x3).
Eigen::MatrixXd forced_dense_gram();

Certificate ex32_hand_certificate();
Certificate ex33_hand_certificate_nu0();
Certificate ex33_hand_certificate_nu1();
Certificate ex34_hand_certificate();

} // namespace examples
} // namespace sosmat
