#pragma once

#include <Eigen/Dense>

#include "tuckergrid/cross.hpp"
#include "tuckergrid/tucker.hpp"

namespace tuckergrid {

/// (-Delta_h - mu) with the 7-point stencil and zero Dirichlet values on the
/// ghost layer half a cell outside [-L, L]^3. Diagonalized per mode by the
/// orthonormal DST-I with eigenvalues eta_i = (2/h^2)(1 - cos(pi i/(n+1))).
struct ShiftedLaplacian {
    Grid grid;
    double shift = 0.0;  // mu
    Eigen::VectorXd eigenvalues;

    ShiftedLaplacian(const Grid& g, double mu);
    double min_symbol() const {
        return 3.0 * eigenvalues(0) - shift;
    }
};

/// Solve (-Delta_h - mu) u = rhs: sine transform of the factors, diagonal
/// scaling 1/(eta_i + eta_j + eta_k - mu) by cross approximation (at eps/3 of
/// the budget), inverse transform, rounding.
TuckerTensor solve(const ShiftedLaplacian& op, const TuckerTensor& rhs, double eps,
                   std::uint64_t seed = 0, CrossReport* report = nullptr);

/// 7-point discrete Laplacian Delta_h u (so a DST eigenfunction maps to
/// -(eta_p+eta_q+eta_s) times itself), applied factor-wise; exact in the
/// format (ranks triple, caller rounds if needed).
TuckerTensor apply_laplacian(const Grid& grid, const TuckerTensor& u);

/// The 1D second-difference matrix (Dirichlet ghosts) used by the stencil.
Eigen::MatrixXd second_difference_matrix(const Grid& grid);

}  // namespace tuckergrid
