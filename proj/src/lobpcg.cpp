#include "relaxmm/lobpcg.hpp"

#include <stdexcept>

namespace relaxmm {

namespace {

// Ritz pairs of (S^T A S, S^T B S), ordered from the sought end. Directions with
// tiny B-norm relative to the largest are discarded.
struct Ritz {
    Eigen::VectorXd values;
    Eigen::MatrixXd coeffs;  // columns in the S basis
};

Ritz rayleigh_ritz(const Eigen::MatrixXd& S, const Eigen::MatrixXd& AS, const Eigen::MatrixXd& BS, bool largest) {
    Eigen::MatrixXd G = S.transpose() * BS;
    Eigen::MatrixXd H = S.transpose() * AS;
    G = 0.5 * (G + G.transpose());
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(G);
    const Eigen::VectorXd d = gs.eigenvalues();
    const double cut = 1e-13 * d.cwiseAbs().maxCoeff();
    int keep = 0;
    for (int i = 0; i < d.size(); ++i)
        if (d(i) > cut) ++keep;
    Eigen::MatrixXd T(S.cols(), keep);
    int c = 0;
    for (int i = 0; i < d.size(); ++i)
        if (d(i) > cut) T.col(c++) = gs.eigenvectors().col(i) / std::sqrt(d(i));
    Eigen::MatrixXd M = T.transpose() * H * T;
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ms(M);
    Ritz r;
    r.values.resize(keep);
    r.coeffs.resize(S.cols(), keep);
    for (int i = 0; i < keep; ++i) {
        const int src = largest ? keep - 1 - i : i;
        r.values(i) = ms.eigenvalues()(src);
        r.coeffs.col(i) = T * ms.eigenvectors().col(src);
    }
    return r;
}

}  // namespace

LobpcgResult lobpcg(const BlockOperator& A, const BlockOperator& B, Eigen::MatrixXd X, const LobpcgOptions& options) {
    const Eigen::Index n = X.rows(), k = X.cols();
    if (k == 0 || n < 3 * k) throw std::invalid_argument("lobpcg: block must be nonempty and at most n/3 wide");

    Eigen::MatrixXd AX(n, k), BX(n, k);
    A(X, AX);
    B(X, BX);
    {
        const Ritz r = rayleigh_ritz(X, AX, BX, options.largest);
        if (r.values.size() < k) throw std::invalid_argument("lobpcg: initial block is rank deficient");
        X = X * r.coeffs.leftCols(k);
        AX = AX * r.coeffs.leftCols(k);
        BX = BX * r.coeffs.leftCols(k);
    }

    LobpcgResult out;
    Eigen::MatrixXd P, AP, BP;
    Eigen::VectorXd lambda(k);
    for (Eigen::Index j = 0; j < k; ++j) lambda(j) = X.col(j).dot(AX.col(j)) / X.col(j).dot(BX.col(j));

    for (int it = 0;; ++it) {
        Eigen::MatrixXd R = AX - BX * lambda.asDiagonal();
        out.residuals.resize(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            const double scale = AX.col(j).norm() + std::abs(lambda(j)) * BX.col(j).norm();
            out.residuals(j) = scale > 0.0 ? R.col(j).norm() / scale : 0.0;
        }
        out.iterations = it;
        if (out.residuals.maxCoeff() <= options.tolerance) {
            out.converged = true;
            break;
        }
        if (it >= options.max_iterations) break;

        for (Eigen::Index j = 0; j < k; ++j) {
            const double nr = R.col(j).norm();
            if (nr > 0.0) R.col(j) /= nr;
        }
        Eigen::MatrixXd AR(n, k), BR(n, k);
        A(R, AR);
        B(R, BR);

        const Eigen::Index m = P.cols();
        Eigen::MatrixXd S(n, 2 * k + m), AS(n, 2 * k + m), BS(n, 2 * k + m);
        S << X, R, P;
        AS << AX, AR, AP;
        BS << BX, BR, BP;
        const Ritz r = rayleigh_ritz(S, AS, BS, options.largest);
        if (r.values.size() < k) break;
        const Eigen::MatrixXd C = r.coeffs.leftCols(k);

        // new search directions: the part of the update outside span(X)
        const Eigen::MatrixXd Cr = C.bottomRows(k + m);
        P = S.rightCols(k + m) * Cr;
        AP = AS.rightCols(k + m) * Cr;
        BP = BS.rightCols(k + m) * Cr;
        for (Eigen::Index j = 0; j < k; ++j) {
            const double np = std::sqrt(std::max(P.col(j).dot(BP.col(j)), 0.0));
            if (np > 0.0) {
                P.col(j) /= np;
                AP.col(j) /= np;
                BP.col(j) /= np;
            }
        }
        X = S * C;
        AX = AS * C;
        BX = BS * C;
        lambda = r.values.head(k);
    }
    out.values = lambda;
    out.vectors = X;
    return out;
}

}  // namespace relaxmm
