#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sosmat {

/// Block-diagonal LMI program in SDPA convention:
///   minimize b^T y  subject to  F(y) = F0 + sum_i y_i F_i >= 0,
/// extended with free_vars scalar equality rows  G^T y = f0
/// whose dual multipliers are free variables on the Gram side.
struct SdpProblem {
    struct Triplet {
        int block;  // 0-based
        int row;    // 0-based, row <= col
        int col;
        double value;
    };

    std::vector<int> blocks; // positive = PSD block, negative = diagonal/LP block
    int free_vars = 0;
    std::vector<Triplet> F0;
    std::vector<std::vector<Triplet>> F; // one list per variable y_i
    Eigen::VectorXd b;
    Eigen::VectorXd f0;  // length free_vars
    Eigen::MatrixXd G;   // ell x free_vars

    int var_count() const { return static_cast<int>(F.size()); }
};

enum class SdpStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations, NumericalFailure };

std::string to_string(SdpStatus s);

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    Eigen::VectorXd y;
    std::vector<Eigen::MatrixXd> dual_blocks; // X with <F_i,X> = b_i + G_i lambda
    Eigen::VectorXd free_duals;               // lambda
    double objective = 0.0;                   // b^T y
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    double certificate_violation = 0.0; // Farkas residual for infeasible statuses
    int iterations = 0;
    std::string message;
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 200;
};

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts = {});

/// SDPA sparse format (.dat-s); free equality rows are exported as a +/- LP block.
std::string export_sdpa(const SdpProblem& p);
SdpProblem parse_sdpa(const std::string& text);

/// Residual of the Farkas certificate carried by an infeasible solution.
double verify_infeasibility_certificate(const SdpProblem& p, const SdpSolution& s);

} // namespace sosmat
