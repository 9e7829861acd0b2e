#include "tuckergrid/cross.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tuckergrid {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

[[noreturn]] void throw_nan(int i, int j, int k) {
    std::ostringstream ss;
    ss << "cross: oracle returned NaN at index (" << i << ", " << j << ", " << k << ")";
    throw std::runtime_error(ss.str());
}

void check_finite(double v, int i, int j, int k) {
    if (std::isnan(v)) throw_nan(i, j, k);
}

// Index triple helpers: fiber convention is (mode; a, b) where (a, b) are the
// remaining indices in increasing mode order.
std::array<int, 3> assemble_index(int mode, int pos, int a, int b) {
    switch (mode) {
        case 0: return {pos, a, b};
        case 1: return {a, pos, b};
        default: return {a, b, pos};
    }
}

// The pair of indices complementary to `mode` from a full triple.
std::pair<int, int> complement(int mode, const std::array<int, 3>& idx) {
    switch (mode) {
        case 0: return {idx[1], idx[2]};
        case 1: return {idx[0], idx[2]};
        default: return {idx[0], idx[1]};
    }
}

// Greedy rectangular LU pivoting followed by maxvol swaps; returns r row
// indices of Q (n x r, full column rank) whose submatrix has quasi-maximal
// volume. Deterministic.
std::vector<int> maxvol_rows(const MatrixXd& Q) {
    const int n = static_cast<int>(Q.rows());
    const int r = static_cast<int>(Q.cols());
    std::vector<int> rows;
    rows.reserve(r);
    if (r >= n) {
        for (int i = 0; i < n; ++i) rows.push_back(i);
        return rows;
    }
    MatrixXd W = Q;
    std::vector<char> used(n, 0);
    for (int c = 0; c < r; ++c) {
        int best = -1;
        double best_val = -1.0;
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            const double v = std::abs(W(i, c));
            if (v > best_val) {
                best_val = v;
                best = i;
            }
        }
        rows.push_back(best);
        used[best] = 1;
        const double piv = W(best, c);
        if (std::abs(piv) > 1e-300) {
            W.noalias() -= (W.col(c) / piv) * W.row(best);
        }
    }

    // Swap iterations: bring |B|_max = |Q inv(Q[rows,:])|_max under 1 + delta.
    const double delta = 0.05;
    for (int iter = 0; iter < 50; ++iter) {
        MatrixXd sub(r, r);
        for (int t = 0; t < r; ++t) sub.row(t) = Q.row(rows[t]);
        Eigen::PartialPivLU<MatrixXd> lu(sub.transpose());
        MatrixXd B = lu.solve(Q.transpose()).transpose();  // n x r, B[rows,:] = I
        int bi = 0, bj = 0;
        double bmax = 0.0;
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < r; ++c) {
                const double v = std::abs(B(i, c));
                if (v > bmax) {
                    bmax = v;
                    bi = i;
                    bj = c;
                }
            }
        if (bmax <= 1.0 + delta) break;
        rows[bj] = bi;
    }
    return rows;
}

struct ValidationSample {
    std::array<int, 3> index;
    double value = 0.0;
    double residual = 0.0;
};

}  // namespace

void ElementOracle::eval_fiber(int mode, int a, int b, double* out) const {
    const auto s = shape();
    for (int p = 0; p < s[mode]; ++p) {
        const auto idx = assemble_index(mode, p, a, b);
        out[p] = eval(idx[0], idx[1], idx[2]);
    }
}

void ElementOracle::eval_block(std::span<const int> I, std::span<const int> J,
                               std::span<const int> K, Dense3& out) const {
    out = Dense3({static_cast<int>(I.size()), static_cast<int>(J.size()),
                  static_cast<int>(K.size())});
    for (std::size_t k = 0; k < K.size(); ++k)
        for (std::size_t j = 0; j < J.size(); ++j)
            for (std::size_t i = 0; i < I.size(); ++i)
                out(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)) =
                    eval(I[i], J[j], K[k]);
}

TensorFunctionOracle::TensorFunctionOracle(std::vector<const TuckerTensor*> inputs, Func f)
    : inputs_(std::move(inputs)), f_(std::move(f)) {
    if (inputs_.empty())
        throw std::invalid_argument("TensorFunctionOracle: need at least one input");
    shape_ = inputs_[0]->shape();
    for (const auto* t : inputs_)
        if (t->shape() != shape_)
            throw std::invalid_argument("TensorFunctionOracle: shape mismatch");
}

double TensorFunctionOracle::eval(int i, int j, int k) const {
    std::vector<double> vals(inputs_.size());
    for (std::size_t t = 0; t < inputs_.size(); ++t) vals[t] = inputs_[t]->value(i, j, k);
    return f_(i, j, k, vals.data());
}

void TensorFunctionOracle::eval_fiber(int mode, int a, int b, double* out) const {
    const int n = shape_[mode];
    const std::size_t nt = inputs_.size();
    std::vector<double> buf(nt * static_cast<std::size_t>(n));
    for (std::size_t t = 0; t < nt; ++t)
        inputs_[t]->fiber(mode, a, b, buf.data() + t * n);
    std::vector<double> vals(nt);
    for (int p = 0; p < n; ++p) {
        for (std::size_t t = 0; t < nt; ++t) vals[t] = buf[t * n + p];
        const auto idx = assemble_index(mode, p, a, b);
        out[p] = f_(idx[0], idx[1], idx[2], vals.data());
    }
}

void TensorFunctionOracle::eval_block(std::span<const int> I, std::span<const int> J,
                                      std::span<const int> K, Dense3& out) const {
    const std::size_t nt = inputs_.size();
    std::vector<Dense3> blocks(nt);
    for (std::size_t t = 0; t < nt; ++t) blocks[t] = inputs_[t]->block(I, J, K);
    out = Dense3({static_cast<int>(I.size()), static_cast<int>(J.size()),
                  static_cast<int>(K.size())});
    std::vector<double> vals(nt);
    for (std::size_t k = 0; k < K.size(); ++k)
        for (std::size_t j = 0; j < J.size(); ++j)
            for (std::size_t i = 0; i < I.size(); ++i) {
                for (std::size_t t = 0; t < nt; ++t)
                    vals[t] = blocks[t](static_cast<int>(i), static_cast<int>(j),
                                        static_cast<int>(k));
                out(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)) =
                    f_(I[i], J[j], K[k], vals.data());
            }
}

TuckerTensor cross(const ElementOracle& oracle, const CrossOptions& options,
                   CrossReport* report) {
    if (options.eps <= 0.0) throw std::invalid_argument("cross: eps must be positive");
    const auto shape = oracle.shape();
    const int nmax = std::max({shape[0], shape[1], shape[2]});
    std::array<int, 3> cap;
    for (int m = 0; m < 3; ++m) {
        cap[m] = options.max_rank > 0 ? std::min(options.max_rank, shape[m])
                                      : std::min(shape[m], 256);
        cap[m] = std::max(cap[m], 1);
    }

    CrossReport rep;
    std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
    auto rand_index = [&rng](int n) {
        return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    };

    // Initial pivots: strongest values among the center, a diagonal sweep and
    // a batch of random samples.
    std::vector<std::array<int, 3>> probes;
    probes.push_back({shape[0] / 2, shape[1] / 2, shape[2] / 2});
    const int dstep = std::max(1, nmax / 16);
    for (int p = 0; p < nmax; p += dstep)
        probes.push_back({std::min(p, shape[0] - 1), std::min(p, shape[1] - 1),
                          std::min(p, shape[2] - 1)});
    for (int s = 0; s < 128; ++s)
        probes.push_back({rand_index(shape[0]), rand_index(shape[1]), rand_index(shape[2])});
    std::vector<double> probe_values(probes.size());
    double best = -1.0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const auto& idx = probes[p];
        const double v = oracle.eval(idx[0], idx[1], idx[2]);
        ++rep.evaluations;
        check_finite(v, idx[0], idx[1], idx[2]);
        probe_values[p] = std::abs(v);
        best = std::max(best, probe_values[p]);
    }
    if (best == 0.0) {
        rep.converged = true;
        rep.ranks = {1, 1, 1};
        if (report) *report = rep;
        return TuckerTensor::zero(shape);
    }

    // Cross pairs per mode and their fiber matrices, seeded with the top
    // probes (first index wins ties).
    std::vector<std::size_t> order(probes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return probe_values[a] > probe_values[b];
    });
    std::array<std::vector<std::pair<int, int>>, 3> pairs;
    std::array<std::set<std::pair<int, int>>, 3> pair_set;
    std::array<MatrixXd, 3> fibers;
    for (int m = 0; m < 3; ++m) fibers[m].resize(shape[m], 0);
    const int n_seed = 4;
    for (std::size_t o : order) {
        if (probe_values[o] == 0.0) break;
        bool any_room = false;
        for (int m = 0; m < 3; ++m) {
            if (static_cast<int>(pairs[m].size()) >= std::min(n_seed, cap[m])) continue;
            const auto pr = complement(m, probes[o]);
            if (pair_set[m].insert(pr).second) pairs[m].push_back(pr);
            any_room = true;
        }
        if (!any_room) break;
    }

    TuckerTensor result = TuckerTensor::zero(shape);
    const int max_sweeps = 200;
    std::vector<double> fiber_buf(static_cast<std::size_t>(nmax));
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        rep.sweeps = sweep;
        // Evaluate newly added fibers.
        std::array<MatrixXd, 3> Q;
        std::array<std::vector<int>, 3> rows;
        for (int m = 0; m < 3; ++m) {
            if (static_cast<int>(pairs[m].size()) >= shape[m]) {
                // Saturated mode: interpolate on the full index range, which
                // is exact regardless of fiber conditioning.
                Q[m] = MatrixXd::Identity(shape[m], shape[m]);
                rows[m].resize(shape[m]);
                for (int i = 0; i < shape[m]; ++i) rows[m][i] = i;
                continue;
            }
            const int have = static_cast<int>(fibers[m].cols());
            const int want = static_cast<int>(pairs[m].size());
            if (want > have) {
                fibers[m].conservativeResize(Eigen::NoChange, want);
                for (int c = have; c < want; ++c) {
                    const auto [a, b] = pairs[m][c];
                    oracle.eval_fiber(m, a, b, fiber_buf.data());
                    rep.evaluations += shape[m];
                    for (int p = 0; p < shape[m]; ++p) {
                        const auto idx = assemble_index(m, p, a, b);
                        check_finite(fiber_buf[p], idx[0], idx[1], idx[2]);
                        fibers[m](p, c) = fiber_buf[p];
                    }
                }
            }
            // Orthonormal basis of the sampled fibers; numerically zero
            // directions are dropped.
            Eigen::BDCSVD<MatrixXd> svd(fibers[m], Eigen::ComputeThinU);
            const VectorXd& s = svd.singularValues();
            int p = 0;
            while (p < s.size() && s(p) > 1e-14 * s(0)) ++p;
            p = std::max(p, 1);
            Q[m] = svd.matrixU().leftCols(p);
            rows[m] = maxvol_rows(Q[m]);
        }

        // Interpolation core and factors.
        Dense3 G;
        oracle.eval_block(rows[0], rows[1], rows[2], G);
        rep.evaluations +=
            static_cast<long long>(rows[0].size()) * rows[1].size() * rows[2].size();
        for (std::size_t k = 0; k < rows[2].size(); ++k)
            for (std::size_t j = 0; j < rows[1].size(); ++j)
                for (std::size_t i = 0; i < rows[0].size(); ++i)
                    check_finite(G(static_cast<int>(i), static_cast<int>(j),
                                   static_cast<int>(k)),
                                 rows[0][i], rows[1][j], rows[2][k]);
        std::array<MatrixXd, 3> factors;
        for (int m = 0; m < 3; ++m) {
            const int p = static_cast<int>(Q[m].cols());
            MatrixXd sub(p, p);
            for (int t = 0; t < p; ++t) sub.row(t) = Q[m].row(rows[m][t]);
            Eigen::PartialPivLU<MatrixXd> lu(sub.transpose());
            factors[m] = lu.solve(Q[m].transpose()).transpose();
        }
        result = TuckerTensor(std::move(G), std::move(factors));

        // Held-out validation on random fibers: at least 100 * current rank
        // sampled indices.
        const int rank_now = result.max_rank();
        const long long target = 100LL * std::max(1, rank_now);
        int nfibers = static_cast<int>(target / nmax) + 2;
        double sum_val2 = 0.0, sum_res2 = 0.0;
        std::vector<ValidationSample> samples;
        std::vector<double> approx_buf(static_cast<std::size_t>(nmax));
        for (int f = 0; f < nfibers; ++f) {
            const int m = f % 3;
            const int a = rand_index(shape[m == 0 ? 1 : 0]);
            const int b = rand_index(shape[m == 2 ? 1 : 2]);
            oracle.eval_fiber(m, a, b, fiber_buf.data());
            rep.evaluations += shape[m];
            result.fiber(m, a, b, approx_buf.data());
            for (int p = 0; p < shape[m]; ++p) {
                const auto idx = assemble_index(m, p, a, b);
                check_finite(fiber_buf[p], idx[0], idx[1], idx[2]);
                const double r = fiber_buf[p] - approx_buf[p];
                sum_val2 += fiber_buf[p] * fiber_buf[p];
                sum_res2 += r * r;
                samples.push_back({idx, fiber_buf[p], r});
            }
        }
        double rel;
        if (sum_val2 > 0.0)
            rel = std::sqrt(sum_res2 / sum_val2);
        else
            rel = sum_res2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        rep.residual_estimate = rel;
        if (rel <= options.eps) {
            rep.converged = true;
            break;
        }

        // Enrich pivot pairs from the largest residuals (stable order: first
        // sample wins exact ties). Rank roughly doubles per sweep; the final
        // rounding trims any overshoot.
        std::stable_sort(samples.begin(), samples.end(),
                         [](const ValidationSample& x, const ValidationSample& y) {
                             return std::abs(x.residual) > std::abs(y.residual);
                         });
        const int enrich = std::max(4, rank_now);
        std::array<int, 3> added{0, 0, 0};
        for (const auto& s : samples) {
            bool need_more = false;
            for (int m = 0; m < 3; ++m) {
                if (added[m] >= enrich) continue;
                if (static_cast<int>(pairs[m].size()) >= cap[m]) continue;
                const auto pr = complement(m, s.index);
                if (pair_set[m].insert(pr).second) {
                    pairs[m].push_back(pr);
                    ++added[m];
                }
                need_more = true;
            }
            if (!need_more) break;
        }
        if (added[0] + added[1] + added[2] == 0) {
            // Saturated (rank cap or no informative new pivots): stop with the
            // best approximation so far, flagged as not converged.
            rep.converged = false;
            break;
        }
    }

    result = result.rounded(options.eps / 3.0);
    rep.ranks = result.ranks();
    if (report) *report = rep;
    return result;
}

TuckerTensor hadamard(const TuckerTensor& a, const TuckerTensor& b, double eps,
                      std::uint64_t seed, CrossReport* report) {
    if (!a.same_shape(b)) throw std::invalid_argument("hadamard: shape mismatch");
    TensorFunctionOracle oracle({&a, &b},
                                [](int, int, int, const double* v) { return v[0] * v[1]; });
    CrossOptions opt;
    opt.eps = eps;
    opt.seed = seed;
    const int bound = a.max_rank() * b.max_rank() + 8;
    opt.max_rank = std::min({bound, a.shape()[0], a.shape()[1], a.shape()[2]});
    return cross(oracle, opt, report);
}

TuckerTensor map_elementwise(const TuckerTensor& a,
                             const std::function<double(double)>& f, double eps,
                             std::uint64_t seed, CrossReport* report) {
    TensorFunctionOracle oracle({&a},
                                [&f](int, int, int, const double* v) { return f(v[0]); });
    CrossOptions opt;
    opt.eps = eps;
    opt.seed = seed;
    return cross(oracle, opt, report);
}

}  // namespace tuckergrid
