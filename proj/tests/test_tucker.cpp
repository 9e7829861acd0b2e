#include <doctest.h>

#include <random>
#include <sstream>

#include "test_helpers.hpp"
#include "tuckergrid/io.hpp"
#include "tuckergrid/tucker.hpp"

using namespace tuckergrid;
using namespace tuckergrid::testing;

TEST_CASE("grid node convention") {
    Grid g(4.0, 8);
    CHECK(g.step == doctest::Approx(1.0));
    CHECK(g.node(0) == doctest::Approx(-3.5));
    CHECK(g.node(7) == doctest::Approx(3.5));
    CHECK(g.raw_node(0) == doctest::Approx(-4.0));
    CHECK(g.raw_node(4) == doctest::Approx(0.0));
    CHECK_THROWS(Grid(-1.0, 8));
}

TEST_CASE("from_dense: rank-1 outer product is exact at ranks (1,1,1)") {
    std::mt19937_64 rng(7);
    const int n = 12;
    auto u = random_vector(n, rng), v = random_vector(n, rng), w = random_vector(n, rng);
    Dense3 a({n, n, n});
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) a(i, j, k) = u(i) * v(j) * w(k);
    TuckerTensor t = TuckerTensor::from_dense(a, 1e-6);
    CHECK(t.ranks() == std::array<int, 3>{1, 1, 1});
    CHECK(relative_error(a, t) < 1e-13);
}

TEST_CASE("from_dense: zero tensor gives the rank-(1,1,1) zero representation") {
    Dense3 a({8, 8, 8});
    TuckerTensor t = TuckerTensor::from_dense(a, 1e-8);
    CHECK(t.ranks() == std::array<int, 3>{1, 1, 1});
    CHECK(t.norm() == 0.0);
}

TEST_CASE("from_dense: sum of three generic rank-1 terms recovers ranks (3,3,3)") {
    std::mt19937_64 rng(21);
    const int n = 16;
    Dense3 a({n, n, n});
    for (int term = 0; term < 3; ++term) {
        auto u = random_vector(n, rng), v = random_vector(n, rng), w = random_vector(n, rng);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) a(i, j, k) += u(i) * v(j) * w(k);
    }
    TuckerTensor t = TuckerTensor::from_dense(a, 1e-12);
    CHECK(t.ranks() == std::array<int, 3>{3, 3, 3});
    CHECK(relative_error(a, t) < 1e-12);
}

TEST_CASE("from_dense rejects bad tolerances") {
    Dense3 a({4, 4, 4});
    CHECK_THROWS(TuckerTensor::from_dense(a, 0.0));
}

TEST_CASE("round: exactly dependent factor columns collapse to rank 1") {
    std::mt19937_64 rng(3);
    const int n = 10;
    auto u = random_vector(n, rng), v = random_vector(n, rng), w = random_vector(n, rng);
    // Rank padded to 2 with a duplicated column; effective rank 1.
    Eigen::MatrixXd uu(n, 2), vv(n, 2), ww(n, 2);
    uu << u, u;
    vv << v, v;
    ww << w, w;
    Dense3 core({2, 2, 2});
    core(0, 0, 0) = 1.0;
    core(1, 1, 1) = 0.5;
    TuckerTensor t(core, {uu, vv, ww});
    TuckerTensor r = t.rounded(1e-10);
    CHECK(r.ranks() == std::array<int, 3>{1, 1, 1});
    CHECK(relative_error(t.densify(), r) < 1e-12);
}

TEST_CASE("round: error bound holds when truncating equal orthogonal terms") {
    const int n = 8;
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(n), e2 = Eigen::VectorXd::Zero(n);
    e1(0) = 1.0;
    e2(1) = 1.0;
    TuckerTensor t = add(TuckerTensor::rank_one(e1, e1, e1), TuckerTensor::rank_one(e2, e2, e2));
    const double eps = 0.5 * std::sqrt(2.0);
    TuckerTensor r = t.rounded(eps);
    const double err = dense_diff_norm(t.densify(), r.densify());
    CHECK(err <= eps * t.norm() * (1.0 + 1e-12));
}

TEST_CASE("round is idempotent at fixed eps") {
    TuckerTensor t = random_tucker({14, 14, 14}, {5, 4, 6}, 99);
    const double eps = 1e-3;
    TuckerTensor r1 = t.rounded(eps);
    TuckerTensor r2 = r1.rounded(eps);
    const double err = dense_diff_norm(r1.densify(), r2.densify());
    CHECK(err <= eps * t.norm());
    CHECK(r2.ranks() == r1.ranks());
}

TEST_CASE("round leaves orthonormal factors") {
    TuckerTensor t = random_tucker({12, 12, 12}, {4, 5, 3}, 5);
    TuckerTensor r = t.rounded(1e-8);
    for (int m = 0; m < 3; ++m) {
        Eigen::MatrixXd gram = r.factor(m).transpose() * r.factor(m);
        Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
        CHECK((gram - eye).norm() <= 1e-12);
    }
}

TEST_CASE("rounding is quasi-optimal against the dense HOSVD oracle") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        TuckerTensor t = random_tucker({16, 16, 16}, {6, 6, 6}, seed);
        Dense3 dense = t.densify();
        TuckerTensor r = t.rounded(0.3);  // coarse eps forces actual truncation
        const double err = dense_diff_norm(dense, r.densify());
        Dense3 best = hosvd_truncate(dense, r.ranks());
        const double oracle_err = dense_diff_norm(dense, best);
        CHECK(err <= std::sqrt(3.0) * oracle_err + 1e-13);
    }
}

TEST_CASE("add: zero is the identity and t - t rounds to zero") {
    TuckerTensor t = random_tucker({9, 9, 9}, {3, 3, 3}, 17);
    TuckerTensor z = TuckerTensor::zero({9, 9, 9});
    CHECK(relative_error(t.densify(), add(t, z)) < 1e-14);
    TuckerTensor diff = add(t, scale(t, -1.0)).rounded(1e-12);
    CHECK(diff.norm() <= 1e-12 * t.norm());
}

TEST_CASE("add matches the dense elementwise sum") {
    TuckerTensor a = random_tucker({16, 16, 16}, {2, 2, 2}, 31);
    TuckerTensor b = random_tucker({16, 16, 16}, {2, 2, 2}, 32);
    TuckerTensor s = add(a, b);
    CHECK(s.ranks() == std::array<int, 3>{4, 4, 4});
    Dense3 expect = a.densify();
    const Dense3 bd = b.densify();
    for (std::size_t i = 0; i < expect.size(); ++i) expect.data()[i] += bd.data()[i];
    CHECK(dense_diff_norm(expect, s.densify()) <= 1e-14 * expect.frobenius_norm());
}

TEST_CASE("add rejects shape mismatches") {
    TuckerTensor a = random_tucker({8, 8, 8}, {2, 2, 2}, 1);
    TuckerTensor b = random_tucker({8, 8, 9}, {2, 2, 2}, 2);
    CHECK_THROWS(add(a, b));
}

TEST_CASE("scale: by 1, by 0 (after rounding), and against the dense oracle") {
    TuckerTensor t = random_tucker({10, 10, 10}, {3, 2, 4}, 8);
    CHECK(relative_error(t.densify(), scale(t, 1.0)) < 1e-15);
    CHECK(scale(t, 0.0).rounded(1e-12).norm() == 0.0);
    Dense3 expect = t.densify();
    for (double& v : expect.storage()) v *= 2.5;
    CHECK(dense_diff_norm(expect, scale(t, 2.5).densify()) <=
          1e-14 * expect.frobenius_norm());
}

TEST_CASE("inner: trivial identities and the dense contraction oracle") {
    TuckerTensor t = random_tucker({12, 12, 12}, {3, 3, 3}, 41);
    TuckerTensor z = TuckerTensor::zero({12, 12, 12});
    CHECK(inner(t, z) == 0.0);
    const double n2 = inner(t, t);
    CHECK(n2 >= 0.0);
    CHECK(std::sqrt(n2) == doctest::Approx(t.norm()).epsilon(1e-12));

    TuckerTensor b = random_tucker({12, 12, 12}, {3, 3, 3}, 42);
    const Dense3 td = t.densify(), bd = b.densify();
    double expect = 0.0;
    for (std::size_t i = 0; i < td.size(); ++i) expect += td.data()[i] * bd.data()[i];
    CHECK(inner(t, b) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("inner is a symmetric bilinear form") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 5; ++trial) {
        TuckerTensor a = random_tucker({10, 10, 10}, {2, 3, 2}, rng());
        TuckerTensor b = random_tucker({10, 10, 10}, {3, 2, 3}, rng());
        TuckerTensor c = random_tucker({10, 10, 10}, {2, 2, 2}, rng());
        CHECK(inner(a, b) == doctest::Approx(inner(b, a)).epsilon(1e-12));
        const double lhs = inner(add(a, b), c);
        const double rhs = inner(a, c) + inner(b, c);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("norm: trivial identities and the dense Frobenius oracle") {
    TuckerTensor z = TuckerTensor::zero({6, 6, 6});
    CHECK(z.norm() == 0.0);
    TuckerTensor t = random_tucker({12, 12, 12}, {4, 4, 4}, 77);
    CHECK(scale(t, -1.0).norm() == doctest::Approx(t.norm()).epsilon(1e-13));
    CHECK(t.norm() == doctest::Approx(t.densify().frobenius_norm()).epsilon(1e-13));
}

TEST_CASE("element, fiber and block access agree with the dense reconstruction") {
    TuckerTensor t = random_tucker({9, 11, 7}, {3, 4, 2}, 123);
    Dense3 d = t.densify();
    CHECK(t.value(3, 5, 2) == doctest::Approx(d(3, 5, 2)).epsilon(1e-13));

    std::vector<double> fiber(11);
    t.fiber(1, 4, 6, fiber.data());
    for (int j = 0; j < 11; ++j) CHECK(fiber[j] == doctest::Approx(d(4, j, 6)).epsilon(1e-12));

    const std::vector<int> I{0, 3, 8}, J{1, 10}, K{2, 4, 6};
    Dense3 blk = t.block(I, J, K);
    for (std::size_t k = 0; k < K.size(); ++k)
        for (std::size_t j = 0; j < J.size(); ++j)
            for (std::size_t i = 0; i < I.size(); ++i)
                CHECK(blk(i, j, k) == doctest::Approx(d(I[i], J[j], K[k])).epsilon(1e-12));
}

TEST_CASE("sum contracts against the all-ones tensor") {
    TuckerTensor t = random_tucker({8, 8, 8}, {2, 2, 2}, 9);
    Dense3 d = t.densify();
    double expect = 0.0;
    for (double v : d.storage()) expect += v;
    CHECK(t.sum() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("linear combinations match the dense oracle") {
    std::vector<TuckerTensor> terms;
    for (std::uint64_t s : {1u, 2u, 3u}) terms.push_back(random_tucker({10, 10, 10}, {2, 2, 2}, s));
    const std::vector<double> coeffs{0.5, -1.25, 2.0};
    TuckerTensor lc = linear_combination(terms, coeffs, 1e-12);
    Dense3 expect({10, 10, 10});
    for (int t = 0; t < 3; ++t) {
        Dense3 d = terms[t].densify();
        for (std::size_t i = 0; i < expect.size(); ++i)
            expect.data()[i] += coeffs[t] * d.data()[i];
    }
    CHECK(dense_diff_norm(expect, lc.densify()) <= 1e-11 * expect.frobenius_norm());
}

TEST_CASE("json dump round-trips exactly") {
    TuckerTensor t = random_tucker({7, 7, 7}, {3, 2, 3}, 2024);
    std::stringstream ss;
    save_tensor_json(t, ss);
    TuckerTensor back = load_tensor_json(ss);
    CHECK(back.shape() == t.shape());
    CHECK(back.ranks() == t.ranks());
    CHECK(dense_diff_norm(t.densify(), back.densify()) == 0.0);
}

TEST_CASE("reconstruction identity validates every operation at n <= 32") {
    // Mixed pipeline on one pair of random tensors.
    TuckerTensor a = random_tucker({20, 20, 20}, {4, 3, 5}, 1001);
    TuckerTensor b = random_tucker({20, 20, 20}, {3, 3, 3}, 1002);
    TuckerTensor c = add(scale(a, 0.75), b).rounded(1e-13);
    Dense3 expect = a.densify();
    const Dense3 bd = b.densify();
    for (std::size_t i = 0; i < expect.size(); ++i)
        expect.data()[i] = 0.75 * expect.data()[i] + bd.data()[i];
    CHECK(dense_diff_norm(expect, c.densify()) <= 1e-12 * expect.frobenius_norm());
    CHECK(inner(c, a) == doctest::Approx([&] {
              const Dense3 cd = c.densify(), ad = a.densify();
              double s = 0.0;
              for (std::size_t i = 0; i < cd.size(); ++i) s += cd.data()[i] * ad.data()[i];
              return s;
          }()).epsilon(1e-12));
}
