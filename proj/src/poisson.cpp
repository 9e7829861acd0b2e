#include "tuckergrid/poisson.hpp"

#include <cmath>
#include <stdexcept>

#include "fft_util.hpp"

namespace tuckergrid {

ShiftedLaplacian::ShiftedLaplacian(const Grid& g, double mu) : grid(g), shift(mu) {
    const int n = g.n;
    const double h2 = g.step * g.step;
    eigenvalues.resize(n);
    for (int i = 0; i < n; ++i)
        eigenvalues(i) = 2.0 / h2 * (1.0 - std::cos(M_PI * (i + 1) / (n + 1)));
    if (min_symbol() <= 0.0)
        throw std::invalid_argument("ShiftedLaplacian: indefinite operator (shift too large)");
}

TuckerTensor solve(const ShiftedLaplacian& op, const TuckerTensor& rhs, double eps,
                   std::uint64_t seed, CrossReport* report) {
    if (rhs.shape() != std::array<int, 3>{op.grid.n, op.grid.n, op.grid.n})
        throw std::invalid_argument("poisson::solve: rhs is not on the operator grid");
    if (eps <= 0.0) throw std::invalid_argument("poisson::solve: eps > 0 required");

    TuckerTensor rhs_hat(rhs.core(), {fft::dst1_columns(rhs.factor(0)),
                                      fft::dst1_columns(rhs.factor(1)),
                                      fft::dst1_columns(rhs.factor(2))});

    const Eigen::VectorXd eta = op.eigenvalues;
    const double mu = op.shift;
    TensorFunctionOracle oracle({&rhs_hat}, [eta, mu](int i, int j, int k, const double* v) {
        return v[0] / (eta(i) + eta(j) + eta(k) - mu);
    });
    CrossOptions opt;
    opt.eps = eps / 3.0;
    opt.seed = seed;
    TuckerTensor u_hat = cross(oracle, opt, report);

    TuckerTensor u(u_hat.core(), {fft::dst1_columns(u_hat.factor(0)),
                                  fft::dst1_columns(u_hat.factor(1)),
                                  fft::dst1_columns(u_hat.factor(2))});
    return u.rounded(eps / 3.0);
}

Eigen::MatrixXd second_difference_matrix(const Grid& grid) {
    const int n = grid.n;
    const double h2 = grid.step * grid.step;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        t(i, i) = 2.0 / h2;
        if (i > 0) t(i, i - 1) = -1.0 / h2;
        if (i + 1 < n) t(i, i + 1) = -1.0 / h2;
    }
    return t;
}

TuckerTensor apply_laplacian(const Grid& grid, const TuckerTensor& u) {
    if (u.shape() != std::array<int, 3>{grid.n, grid.n, grid.n})
        throw std::invalid_argument("apply_laplacian: tensor is not on the grid");
    const Eigen::MatrixXd t = second_difference_matrix(grid);
    // -Delta_h u = sum over modes of the 1D second difference.
    TuckerTensor out = u.mode_apply(0, -t);
    out = add(out, u.mode_apply(1, -t));
    out = add(out, u.mode_apply(2, -t));
    return out;
}

}  // namespace tuckergrid
