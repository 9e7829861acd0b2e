#pragma once

#include <Eigen/Dense>

namespace tuckergrid::linalg {

/// Number of trailing singular values whose squared sum stays within
/// budget^2 (values ascending). Keeps at least one direction.
inline int count_dropped(const Eigen::VectorXd& ascending_sq, double budget2) {
    const int n = static_cast<int>(ascending_sq.size());
    double tail = 0.0;
    int drop = 0;
    while (drop < n - 1) {
        const double next = tail + std::max(ascending_sq(drop), 0.0);
        if (next > budget2) break;
        tail = next;
        ++drop;
    }
    return drop;
}

/// Orthonormal basis of the dominant left singular subspace of M, truncated
/// so the discarded part has Frobenius norm <= budget.
///
/// Wide matrices (cols > 2 rows) go through a QR of the transpose followed by
/// a small square SVD, which is exact and far cheaper than a direct SVD.
/// `allow_gram` enables the eigendecomposition of M M^T instead, which is the
/// fastest route but cannot resolve directions below ~1e-8 of the dominant
/// singular value.
inline Eigen::MatrixXd svd_basis(const Eigen::MatrixXd& m, double budget,
                                 bool allow_gram = false) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    if (cols > 2 * rows) {
        Eigen::HouseholderQR<MatrixXd> qr(m.transpose());
        MatrixXd r = qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<MatrixXd> svd(r.transpose(), Eigen::ComputeThinU);
        const VectorXd& s = svd.singularValues();  // descending
        VectorXd asc_sq = s.cwiseProduct(s).reverse();
        const int drop = count_dropped(asc_sq, budget * budget);
        return svd.matrixU().leftCols(static_cast<int>(s.size()) - drop);
    }
    if (allow_gram) {
        MatrixXd gram = m * m.transpose();
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
        const VectorXd& lam = eig.eigenvalues();  // ascending
        const double noise = 8.0 * rows * 2.2e-16 * std::max(lam(rows - 1), 0.0);
        VectorXd clamped = lam.cwiseMax(0.0);
        int drop = count_dropped(clamped, budget * budget);
        // Never keep directions buried in the Gram noise floor.
        while (drop < rows - 1 && clamped(drop) <= noise) ++drop;
        return eig.eigenvectors().rightCols(rows - drop).rowwise().reverse();
    }
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU);
    const VectorXd& s = svd.singularValues();
    VectorXd asc_sq = s.cwiseProduct(s).reverse();
    const int drop = count_dropped(asc_sq, budget * budget);
    return svd.matrixU().leftCols(static_cast<int>(s.size()) - drop);
}

}  // namespace tuckergrid::linalg
