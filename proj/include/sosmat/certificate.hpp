#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sosmat/numeric.hpp"
#include "sosmat/sos.hpp"

namespace sosmat {

/// One SOS matrix term weight * (I (x) v)^T Q (I (x) v) supported on a clique.
/// `gram` is always populated; `gram_exact` marks a rational certificate.
struct CertBlock {
    Clique clique;
    Polynomial weight;
    MonomialBasis basis;
    Eigen::MatrixXd gram;
    std::optional<RatMatrix> gram_exact;
};

struct Certificate {
    Polynomial sigma;
    std::vector<CertBlock> blocks;
    Eigen::VectorXd lambda; // empty when the problem has no parameters
    std::optional<std::vector<Rational>> lambda_exact;

    bool exact() const;
};

/// max_coeff_residual is relative: max |coefficient of (reconstruction - sigma*P)|
/// divided by (1 + max |coefficient of sigma*P|).
struct ResidualReport {
    double max_coeff_residual = 0.0;
    double min_gram_eig = 0.0;
    bool pass = false;
    std::string worst; // entry and monomial of the largest residual
};

ResidualReport verify_certificate(const ParamPolyMatrix& P, const Certificate& cert,
                                  double tol = 1e-6);
ResidualReport verify_certificate(const PolyMatrix& P, const Certificate& cert, double tol = 1e-6);

/// Package the Gram matrices of an optimal solve, clipping negative eigenvalues.
Certificate recover_certificate(const SosProgram& prog, const SdpSolution& sol, double tol = 1e-8);

/// Exact certificate for sigma = (sum x_i^2)^nu from a coefficient-wise clique split.
Certificate certificate_from_polya(const PolyMatrix& P, const PolyaReport& rep);

struct SampleResult {
    double min_eig = 0.0;
    std::vector<double> argmin;
};

/// Minimum over the region {x in box : g_j(x) >= 0} of the smallest eigenvalue
/// of P(x), by rejection sampling plus 200 coordinate-descent polish steps.
/// Deterministic given the seed, independent of thread count.
SampleResult sample_min_eig(const PolyMatrix& P, const std::vector<std::pair<double, double>>& box,
                            const std::vector<Polynomial>& constraints, int samples, unsigned seed);

} // namespace sosmat
