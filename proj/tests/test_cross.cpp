#include <doctest.h>

#include <cmath>
#include <random>

#include "test_helpers.hpp"
#include "tuckergrid/cross.hpp"

using namespace tuckergrid;
using namespace tuckergrid::testing;

namespace {

// Smooth positive rank-2 tensor (two Gaussians), stable across grid sizes.
TuckerTensor gaussian_pair(int n, double width1 = 0.15, double width2 = 0.35) {
    auto profile = [n](double center, double width) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) {
            const double x = (i + 0.5) / n - center;
            v(i) = std::exp(-x * x / (width * width));
        }
        return v;
    };
    TuckerTensor a = TuckerTensor::rank_one(profile(0.35, width1), profile(0.45, width1),
                                            profile(0.55, width1));
    TuckerTensor b = TuckerTensor::rank_one(profile(0.65, width2), profile(0.55, width2),
                                            profile(0.4, width2));
    return add(a, b);
}

Dense3 dense_product(const TuckerTensor& a, const TuckerTensor& b) {
    Dense3 da = a.densify(), db = b.densify();
    for (std::size_t i = 0; i < da.size(); ++i) da.data()[i] *= db.data()[i];
    return da;
}

}  // namespace

TEST_CASE("cross recovers a rank-1 product oracle exactly") {
    std::mt19937_64 rng(5);
    const int n = 20;
    auto u = random_vector(n, rng), v = random_vector(n, rng), w = random_vector(n, rng);
    LambdaOracle oracle({n, n, n},
                        [&](int i, int j, int k) { return u(i) * v(j) * w(k); });
    CrossOptions opt;
    opt.eps = 1e-12;
    CrossReport rep;
    TuckerTensor t = cross(oracle, opt, &rep);
    CHECK(rep.converged);
    CHECK(t.ranks() == std::array<int, 3>{1, 1, 1});
    Dense3 expect({n, n, n});
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) expect(i, j, k) = u(i) * v(j) * w(k);
    CHECK(dense_diff_norm(expect, t.densify()) <= 1e-13 * expect.frobenius_norm());
}

TEST_CASE("cross approximates an elementwise product of rank-2 tensors") {
    const int n = 32;
    TuckerTensor a = gaussian_pair(n);
    TuckerTensor b = gaussian_pair(n, 0.25, 0.2);
    TensorFunctionOracle oracle({&a, &b},
                                [](int, int, int, const double* v) { return v[0] * v[1]; });
    CrossOptions opt;
    opt.eps = 1e-10;
    CrossReport rep;
    TuckerTensor t = cross(oracle, opt, &rep);
    CHECK(rep.converged);
    Dense3 expect = dense_product(a, b);
    CHECK(dense_diff_norm(expect, t.densify()) <= 1e-9 * expect.frobenius_norm());
}

TEST_CASE("cross approximates the cube root of a positive density") {
    const int n = 32;
    TuckerTensor rho = gaussian_pair(n);
    TensorFunctionOracle oracle({&rho}, [](int, int, int, const double* v) {
        return std::cbrt(std::max(v[0], 0.0));
    });
    CrossOptions opt;
    opt.eps = 1e-7;
    CrossReport rep;
    TuckerTensor t = cross(oracle, opt, &rep);
    CHECK(rep.converged);
    Dense3 expect = rho.densify();
    for (double& v : expect.storage()) v = std::cbrt(std::max(v, 0.0));
    CHECK(dense_diff_norm(expect, t.densify()) <= 1e-6 * expect.frobenius_norm());
}

TEST_CASE("cross flags rank-cap saturation as not converged") {
    const int n = 24;
    Dense3 full = random_dense({n, n, n}, 8);  // full-rank noise
    LambdaOracle oracle({n, n, n}, [&](int i, int j, int k) { return full(i, j, k); });
    CrossOptions opt;
    opt.eps = 1e-10;
    opt.max_rank = 4;
    CrossReport rep;
    TuckerTensor t = cross(oracle, opt, &rep);
    CHECK_FALSE(rep.converged);
    CHECK(t.ranks()[0] <= 4);
    CHECK(rep.residual_estimate > 1e-10);
}

TEST_CASE("cross reports the index of a NaN oracle value") {
    const int n = 12;
    LambdaOracle oracle({n, n, n}, [](int i, int, int) {
        return i == 3 ? std::nan("") : 1.0;
    });
    CrossOptions opt;
    opt.eps = 1e-8;
    CHECK_THROWS_AS(cross(oracle, opt), std::runtime_error);
    try {
        cross(oracle, opt);
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("(3, ") != std::string::npos);
    }
}

TEST_CASE("cross returns the zero tensor for an all-zero oracle") {
    LambdaOracle oracle({16, 16, 16}, [](int, int, int) { return 0.0; });
    CrossOptions opt;
    opt.eps = 1e-8;
    CrossReport rep;
    TuckerTensor t = cross(oracle, opt, &rep);
    CHECK(rep.converged);
    CHECK(t.norm() == 0.0);
}

TEST_CASE("hadamard with the ones tensor reproduces the input") {
    const int n = 24;
    TuckerTensor t = gaussian_pair(n);
    TuckerTensor ones = TuckerTensor::rank_one(Eigen::VectorXd::Ones(n),
                                               Eigen::VectorXd::Ones(n),
                                               Eigen::VectorXd::Ones(n));
    TuckerTensor p = hadamard(t, ones, 1e-10);
    CHECK(dense_diff_norm(t.densify(), p.densify()) <= 1e-9 * t.norm());
}

TEST_CASE("hadamard square is nonnegative at sampled indices") {
    const int n = 20;
    TuckerTensor t = random_tucker({n, n, n}, {2, 2, 2}, 77);
    TuckerTensor sq = hadamard(t, t, 1e-10);
    std::mt19937_64 rng(4);
    const double floor = -1e-9 * sq.norm();
    for (int s = 0; s < 200; ++s) {
        const int i = rng() % n, j = rng() % n, k = rng() % n;
        CHECK(sq.value(i, j, k) >= floor);
    }
}

TEST_CASE("hadamard matches the dense elementwise product") {
    const int n = 24;
    TuckerTensor a = random_tucker({n, n, n}, {2, 3, 2}, 100);
    TuckerTensor b = random_tucker({n, n, n}, {3, 2, 2}, 101);
    TuckerTensor p = hadamard(a, b, 1e-11);
    Dense3 expect = dense_product(a, b);
    CHECK(dense_diff_norm(expect, p.densify()) <= 1e-9 * expect.frobenius_norm());
}

TEST_CASE("map_elementwise: identity, constant, and x^(4/3) against dense") {
    const int n = 24;
    TuckerTensor rho = gaussian_pair(n);

    TuckerTensor ident = map_elementwise(rho, [](double x) { return x; }, 1e-11);
    CHECK(dense_diff_norm(rho.densify(), ident.densify()) <= 1e-10 * rho.norm());

    TuckerTensor one = map_elementwise(rho, [](double) { return 1.0; }, 1e-11);
    CHECK(one.ranks() == std::array<int, 3>{1, 1, 1});
    CHECK(one.value(3, 7, 11) == doctest::Approx(1.0).epsilon(1e-11));

    TuckerTensor p43 = map_elementwise(
        rho, [](double x) { return std::pow(std::max(x, 0.0), 4.0 / 3.0); }, 1e-7);
    Dense3 expect = rho.densify();
    for (double& v : expect.storage()) v = std::pow(std::max(v, 0.0), 4.0 / 3.0);
    CHECK(dense_diff_norm(expect, p43.densify()) <= 1e-6 * expect.frobenius_norm());
}

TEST_CASE("evaluation count grows at most linearly in n on a fixed-rank oracle") {
    std::vector<long long> counts;
    std::vector<int> sizes{64, 128, 256};
    for (int n : sizes) {
        TuckerTensor a = gaussian_pair(n);
        TuckerTensor b = gaussian_pair(n, 0.3, 0.18);
        TensorFunctionOracle oracle(
            {&a, &b}, [](int, int, int, const double* v) { return v[0] * v[1]; });
        CrossOptions opt;
        opt.eps = 1e-8;
        opt.seed = 9;
        CrossReport rep;
        cross(oracle, opt, &rep);
        CHECK(rep.converged);
        counts.push_back(rep.evaluations);
    }
    // Log-log slope over the 64 -> 256 range.
    const double slope =
        std::log(double(counts[2]) / double(counts[0])) / std::log(4.0);
    INFO("evaluations: ", counts[0], " ", counts[1], " ", counts[2], " slope ", slope);
    CHECK(slope <= 1.2);
}

TEST_CASE("cross is deterministic for a fixed seed") {
    const int n = 28;
    TuckerTensor a = gaussian_pair(n);
    TensorFunctionOracle oracle({&a}, [](int, int, int, const double* v) {
        return std::exp(-v[0]);
    });
    CrossOptions opt;
    opt.eps = 1e-9;
    opt.seed = 1234;
    CrossReport r1, r2;
    TuckerTensor t1 = cross(oracle, opt, &r1);
    TuckerTensor t2 = cross(oracle, opt, &r2);
    CHECK(r1.evaluations == r2.evaluations);
    CHECK(r1.ranks == r2.ranks);
    CHECK(dense_diff_norm(t1.densify(), t2.densify()) == 0.0);
}

TEST_CASE("cross recovers exact-rank tensors to 1e-12") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const int n = 40;
        TuckerTensor t = random_tucker({n, n, n}, {3, 2, 4}, seed);
        TensorFunctionOracle oracle({&t},
                                    [](int, int, int, const double* v) { return v[0]; });
        CrossOptions opt;
        opt.eps = 1e-13;
        opt.seed = seed;
        CrossReport rep;
        TuckerTensor r = cross(oracle, opt, &rep);
        CHECK(rep.converged);
        CHECK(dense_diff_norm(t.densify(), r.densify()) <= 1e-12 * t.norm());
    }
}
