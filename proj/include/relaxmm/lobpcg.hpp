#pragma once

#include <functional>

#include <Eigen/Dense>

namespace relaxmm {

/// Applies a symmetric operator to each column: Y = Op X.
using BlockOperator = std::function<void(const Eigen::MatrixXd& X, Eigen::MatrixXd& Y)>;

struct LobpcgOptions {
    int max_iterations = 500;
    /// Relative residual ||A x - lambda B x|| / (||A x|| + |lambda| ||B x||).
    double tolerance = 1e-8;
    /// Seek the largest eigenvalues instead of the smallest.
    bool largest = false;
};

struct LobpcgResult {
    Eigen::VectorXd values;   // ordered from the sought end
    Eigen::MatrixXd vectors;  // B-orthonormal columns
    Eigen::VectorXd residuals;
    int iterations = 0;
    bool converged = false;
};

/// Block LOBPCG for the pencil (A, B) with B positive definite on the span of
/// the iterates. The block size is the column count of X0. Rayleigh-Ritz steps
/// drop nearly dependent directions instead of failing.
LobpcgResult lobpcg(const BlockOperator& A, const BlockOperator& B, Eigen::MatrixXd X0,
                    const LobpcgOptions& options = {});

}  // namespace relaxmm
