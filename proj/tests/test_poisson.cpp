#include <doctest.h>

#include <Eigen/Sparse>

#include <cmath>
#include <random>

#include "test_helpers.hpp"
#include "tuckergrid/poisson.hpp"

using namespace tuckergrid;
using namespace tuckergrid::testing;

namespace {

Eigen::VectorXd sine_mode(const Grid& grid, int p) {
    Eigen::VectorXd v(grid.n);
    for (int k = 0; k < grid.n; ++k)
        v(k) = std::sin(M_PI * (p + 1) * (k + 1) / (grid.n + 1));
    return v;
}

// Dense 7-point solve of (-Delta_h - mu) u = rhs via sparse Cholesky.
Dense3 banded_solve_oracle(const Grid& grid, const Dense3& rhs, double mu) {
    const int n = grid.n;
    const double h2 = grid.step * grid.step;
    const int total = n * n * n;
    auto flat = [n](int i, int j, int k) { return i + n * (j + n * k); };
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(total) * 7);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                trips.emplace_back(flat(i, j, k), flat(i, j, k), 6.0 / h2 - mu);
                if (i > 0) trips.emplace_back(flat(i, j, k), flat(i - 1, j, k), -1.0 / h2);
                if (i + 1 < n) trips.emplace_back(flat(i, j, k), flat(i + 1, j, k), -1.0 / h2);
                if (j > 0) trips.emplace_back(flat(i, j, k), flat(i, j - 1, k), -1.0 / h2);
                if (j + 1 < n) trips.emplace_back(flat(i, j, k), flat(i, j + 1, k), -1.0 / h2);
                if (k > 0) trips.emplace_back(flat(i, j, k), flat(i, j, k - 1), -1.0 / h2);
                if (k + 1 < n) trips.emplace_back(flat(i, j, k), flat(i, j, k + 1), -1.0 / h2);
            }
    Eigen::SparseMatrix<double> a(total, total);
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), total);
    Eigen::VectorXd x = solver.solve(b);
    Dense3 out({n, n, n});
    Eigen::Map<Eigen::VectorXd>(out.data(), total) = x;
    return out;
}

}  // namespace

TEST_CASE("eigenvalue table matches the analytic symbol") {
    Grid grid(2.0, 10);
    ShiftedLaplacian op(grid, -0.3);
    for (int i = 0; i < grid.n; ++i) {
        const double expect =
            2.0 / (grid.step * grid.step) * (1.0 - std::cos(M_PI * (i + 1) / (grid.n + 1)));
        CHECK(op.eigenvalues(i) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(op.eigenvalues(i) > 0.0);
    }
}

TEST_CASE("indefinite shifts are rejected") {
    Grid grid(2.0, 12);
    ShiftedLaplacian ok(grid, -1.0);
    const double mu_bad = 3.0 * ok.eigenvalues(0) + 1.0;
    CHECK_THROWS_AS(ShiftedLaplacian(grid, mu_bad), std::invalid_argument);
}

TEST_CASE("solve reproduces a sine eigenfunction exactly") {
    Grid grid(3.0, 16);
    const double mu = -0.8;
    ShiftedLaplacian op(grid, mu);
    const int p = 2, q = 0, s = 4;
    TuckerTensor rhs = TuckerTensor::rank_one(sine_mode(grid, p), sine_mode(grid, q),
                                              sine_mode(grid, s));
    TuckerTensor u = solve(op, rhs, 1e-12);
    const double factor =
        1.0 / (op.eigenvalues(p) + op.eigenvalues(q) + op.eigenvalues(s) - mu);
    Dense3 expect = rhs.densify();
    for (double& v : expect.storage()) v *= factor;
    CHECK(dense_diff_norm(expect, u.densify()) <= 1e-12 * expect.frobenius_norm());
}

TEST_CASE("solve with mu = 0 matches the dense banded oracle on a delta source") {
    const int n = 17;
    Grid grid(2.0, n);
    ShiftedLaplacian op(grid, 0.0);
    Dense3 delta_dense({n, n, n});
    delta_dense(n / 2, n / 2, n / 2) = 1.0;
    TuckerTensor rhs = TuckerTensor::from_dense(delta_dense, 1e-14);
    TuckerTensor u = solve(op, rhs, 1e-11);
    Dense3 expect = banded_solve_oracle(grid, delta_dense, 0.0);
    CHECK(dense_diff_norm(expect, u.densify()) <= 1e-10 * expect.frobenius_norm());
}

TEST_CASE("solve matches the dense banded oracle on random low-rank input") {
    const int n = 17;
    Grid grid(2.5, n);
    const double mu = -1.7;
    ShiftedLaplacian op(grid, mu);
    TuckerTensor rhs = random_tucker({n, n, n}, {3, 2, 3}, 404);
    TuckerTensor u = solve(op, rhs, 1e-11);
    Dense3 expect = banded_solve_oracle(grid, rhs.densify(), mu);
    CHECK(dense_diff_norm(expect, u.densify()) <= 1e-10 * expect.frobenius_norm());
}

TEST_CASE("solve is linear") {
    const int n = 16;
    Grid grid(2.0, n);
    ShiftedLaplacian op(grid, -0.5);
    TuckerTensor a = random_tucker({n, n, n}, {2, 2, 2}, 1);
    TuckerTensor b = random_tucker({n, n, n}, {2, 2, 2}, 2);
    const double eps = 1e-10;
    TuckerTensor lhs = solve(op, add(a, b).rounded(1e-14), eps);
    TuckerTensor rhs = add(solve(op, a, eps), solve(op, b, eps));
    CHECK(dense_diff_norm(lhs.densify(), rhs.densify()) <= 10 * eps * lhs.norm());
}

TEST_CASE("apply_laplacian: constant field feels only the boundary stencil") {
    const int n = 12;
    Grid grid(2.0, n);
    TuckerTensor ones = TuckerTensor::rank_one(Eigen::VectorXd::Ones(n),
                                               Eigen::VectorXd::Ones(n),
                                               Eigen::VectorXd::Ones(n));
    Dense3 lap = apply_laplacian(grid, ones).densify();
    const double h2 = grid.step * grid.step;
    for (int k = 1; k + 1 < n; ++k)
        for (int j = 1; j + 1 < n; ++j)
            for (int i = 1; i + 1 < n; ++i)
                CHECK(std::abs(lap(i, j, k)) <= 1e-12 / h2);
    // Faces lose one neighbor to the Dirichlet ghost.
    CHECK(lap(0, 4, 4) == doctest::Approx(-1.0 / h2).epsilon(1e-12));
    CHECK(lap(0, 0, 4) == doctest::Approx(-2.0 / h2).epsilon(1e-12));
    CHECK(lap(0, 0, 0) == doctest::Approx(-3.0 / h2).epsilon(1e-12));
}

TEST_CASE("apply_laplacian scales a sine eigenfunction by its eigenvalue") {
    Grid grid(2.0, 14);
    ShiftedLaplacian op(grid, 0.0);
    const int p = 3, q = 1, s = 5;
    TuckerTensor mode = TuckerTensor::rank_one(sine_mode(grid, p), sine_mode(grid, q),
                                               sine_mode(grid, s));
    const double eta = op.eigenvalues(p) + op.eigenvalues(q) + op.eigenvalues(s);
    Dense3 expect = mode.densify();
    for (double& v : expect.storage()) v *= -eta;  // Delta_h mode = -eta mode
    Dense3 got = apply_laplacian(grid, mode).densify();
    CHECK(dense_diff_norm(expect, got) <= 1e-12 * expect.frobenius_norm());
}

TEST_CASE("apply_laplacian matches the dense 7-point stencil") {
    const int n = 16;
    Grid grid(3.0, n);
    TuckerTensor t = random_tucker({n, n, n}, {3, 3, 3}, 88);
    Dense3 d = t.densify();
    Dense3 expect({n, n, n});
    const double h2 = grid.step * grid.step;
    auto val = [&](int i, int j, int k) {
        if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return 0.0;
        return d(i, j, k);
    };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                expect(i, j, k) = (val(i - 1, j, k) + val(i + 1, j, k) + val(i, j - 1, k) +
                                   val(i, j + 1, k) + val(i, j, k - 1) + val(i, j, k + 1) -
                                   6.0 * val(i, j, k)) /
                                  h2;
    Dense3 got = apply_laplacian(grid, t).densify();
    CHECK(dense_diff_norm(expect, got) <= 1e-12 * expect.frobenius_norm());
}

TEST_CASE("solve inverts apply_laplacian on fields vanishing near the boundary") {
    const int n = 24;
    Grid grid(4.0, n);
    // Tight Gaussian, effectively zero at the boundary.
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = std::exp(-4.0 * grid.node(i) * grid.node(i));
    TuckerTensor u0 = TuckerTensor::rank_one(g, g, g);
    const double mu = -0.9;
    ShiftedLaplacian op(grid, mu);
    // rhs = (-Delta_h - mu) u0.
    TuckerTensor rhs = add(scale(apply_laplacian(grid, u0), -1.0), scale(u0, -mu)).rounded(1e-13);
    const double eps = 1e-10;
    TuckerTensor u = solve(op, rhs, eps);
    CHECK(dense_diff_norm(u0.densify(), u.densify()) <= 5 * eps * u0.norm());
}

TEST_CASE("green-step identity: (-1/2 Delta - lambda) phi_hat reproduces -V phi") {
    const int n = 20;
    Grid grid(4.0, n);
    const double lambda = -0.6;
    ShiftedLaplacian op(grid, 2.0 * lambda);
    TuckerTensor vphi = random_tucker({n, n, n}, {3, 3, 3}, 321);
    const double eps = 1e-11;
    TuckerTensor x = solve(op, vphi, eps);
    TuckerTensor phi_hat = scale(x, -2.0);
    // (-1/2 Delta_h - lambda) phi_hat + V phi should vanish.
    TuckerTensor residual =
        add(add(scale(apply_laplacian(grid, phi_hat), -0.5), scale(phi_hat, -lambda)),
            vphi)
            .rounded(1e-14);
    CHECK(residual.norm() <= 5 * eps * vphi.norm());
}

TEST_CASE("discrete maximum principle holds at sampled indices") {
    const int n = 20;
    Grid grid(3.0, n);
    ShiftedLaplacian op(grid, 0.0);
    // Nonnegative rhs: a wide Gaussian bump.
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = std::exp(-grid.node(i) * grid.node(i));
    TuckerTensor rhs = TuckerTensor::rank_one(g, g, g);
    const double eps = 1e-9;
    TuckerTensor u = solve(op, rhs, eps);
    Dense3 ud = u.densify();
    const double floor = -eps * ud.max_abs();
    std::mt19937_64 rng(3);
    for (int s = 0; s < 500; ++s) {
        const int i = rng() % n, j = rng() % n, k = rng() % n;
        CHECK(ud(i, j, k) >= floor);
    }
}
