#include "tuckergrid/tucker.hpp"

#include <cmath>
#include <stdexcept>

#include "linalg_util.hpp"

namespace tuckergrid {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Mode-m unfolding of a column-major 3-way array: rows = mode-m index,
// columns = the other two indices, first of them fastest.
MatrixXd unfold(const Dense3& t, int mode) {
    const auto& d = t.dims();
    if (mode == 0) {
        return Eigen::Map<const MatrixXd>(t.data(), d[0],
                                          static_cast<Eigen::Index>(d[1]) * d[2]);
    }
    if (mode == 1) {
        MatrixXd m(d[1], static_cast<Eigen::Index>(d[0]) * d[2]);
        for (int k = 0; k < d[2]; ++k)
            for (int j = 0; j < d[1]; ++j)
                for (int i = 0; i < d[0]; ++i) m(j, i + static_cast<Eigen::Index>(d[0]) * k) = t(i, j, k);
        return m;
    }
    MatrixXd m(d[2], static_cast<Eigen::Index>(d[0]) * d[1]);
    for (int k = 0; k < d[2]; ++k)
        for (int j = 0; j < d[1]; ++j)
            for (int i = 0; i < d[0]; ++i) m(k, i + static_cast<Eigen::Index>(d[0]) * j) = t(i, j, k);
    return m;
}

Dense3 fold(const MatrixXd& m, int mode, std::array<int, 3> dims) {
    Dense3 t(dims);
    if (mode == 0) {
        Eigen::Map<MatrixXd>(t.data(), dims[0], static_cast<Eigen::Index>(dims[1]) * dims[2]) = m;
        return t;
    }
    if (mode == 1) {
        for (int k = 0; k < dims[2]; ++k)
            for (int j = 0; j < dims[1]; ++j)
                for (int i = 0; i < dims[0]; ++i) t(i, j, k) = m(j, i + static_cast<Eigen::Index>(dims[0]) * k);
        return t;
    }
    for (int k = 0; k < dims[2]; ++k)
        for (int j = 0; j < dims[1]; ++j)
            for (int i = 0; i < dims[0]; ++i) t(i, j, k) = m(k, i + static_cast<Eigen::Index>(dims[0]) * j);
    return t;
}

// New core with mode-m dimension mapped through M (p x r_m).
Dense3 core_mode_apply(const Dense3& core, int mode, const MatrixXd& M) {
    auto dims = core.dims();
    std::array<int, 3> out_dims = dims;
    out_dims[mode] = static_cast<int>(M.rows());
    return fold(M * unfold(core, mode), mode, out_dims);
}

// Leading left singular vectors of M keeping the tail below `budget`
// (absolute, Frobenius). Always keeps at least one column.
MatrixXd truncated_basis(const MatrixXd& M, double budget) {
    return linalg::svd_basis(M, budget);
}

}  // namespace

double Dense3::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Dense3::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Grid::Grid(double L, int n_points) : half_width(L), n(n_points) {
    if (L <= 0.0 || n_points < 2)
        throw std::invalid_argument("Grid: need L > 0 and n >= 2");
    step = 2.0 * L / n_points;
}

Eigen::VectorXd Grid::nodes() const {
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) x(k) = node(k);
    return x;
}

TuckerTensor::TuckerTensor(std::array<int, 3> shape, std::array<int, 3> ranks)
    : shape_(shape), ranks_(ranks), core_(ranks) {
    for (int m = 0; m < 3; ++m) factors_[m] = Eigen::MatrixXd::Zero(shape[m], ranks[m]);
}

TuckerTensor::TuckerTensor(Dense3 core, std::array<Eigen::MatrixXd, 3> factors)
    : core_(std::move(core)) {
    for (int m = 0; m < 3; ++m) {
        shape_[m] = static_cast<int>(factors[m].rows());
        ranks_[m] = static_cast<int>(factors[m].cols());
        if (ranks_[m] != core_.dims()[m])
            throw std::invalid_argument("TuckerTensor: factor/core rank mismatch");
    }
    factors_ = std::move(factors);
}

TuckerTensor TuckerTensor::zero(std::array<int, 3> shape) {
    TuckerTensor t(shape, {1, 1, 1});
    for (int m = 0; m < 3; ++m) t.factors_[m](0, 0) = 1.0;
    return t;
}

TuckerTensor TuckerTensor::rank_one(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                    const Eigen::VectorXd& w) {
    Dense3 core({1, 1, 1});
    core(0, 0, 0) = 1.0;
    return TuckerTensor(std::move(core), {u, v, w});
}

TuckerTensor TuckerTensor::from_dense(const Dense3& a, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("from_dense: eps must be positive");
    const double nrm = a.frobenius_norm();
    if (!std::isfinite(nrm)) throw std::invalid_argument("from_dense: input not finite");
    const auto dims = a.dims();
    if (nrm == 0.0) return zero(dims);

    // Sequentially truncated HOSVD: per-mode budget eps/sqrt(3) of the norm.
    const double budget = eps * nrm / std::sqrt(3.0);
    Dense3 work = a;
    std::array<Eigen::MatrixXd, 3> factors;
    for (int m = 0; m < 3; ++m) {
        Eigen::MatrixXd M = unfold(work, m);
        factors[m] = truncated_basis(M, budget);
        auto d = work.dims();
        d[m] = static_cast<int>(factors[m].cols());
        work = fold(factors[m].transpose() * M, m, d);
    }
    return TuckerTensor(std::move(work), std::move(factors));
}

double TuckerTensor::value(int i, int j, int k) const {
    const auto& r = ranks_;
    double acc = 0.0;
    for (int c = 0; c < r[2]; ++c) {
        const double wc = factors_[2](k, c);
        if (wc == 0.0) continue;
        double acc_c = 0.0;
        for (int b = 0; b < r[1]; ++b) {
            const double vb = factors_[1](j, b);
            if (vb == 0.0) continue;
            double acc_b = 0.0;
            for (int a = 0; a < r[0]; ++a) acc_b += core_(a, b, c) * factors_[0](i, a);
            acc_c += vb * acc_b;
        }
        acc += wc * acc_c;
    }
    return acc;
}

void TuckerTensor::fiber(int mode, int a, int b, double* out) const {
    // Contract the core with the two fixed factor rows, then one matvec.
    const auto& r = ranks_;
    Eigen::VectorXd coeff;
    if (mode == 0) {
        const auto vrow = factors_[1].row(a);
        const auto wrow = factors_[2].row(b);
        coeff = Eigen::VectorXd::Zero(r[0]);
        for (int c = 0; c < r[2]; ++c) {
            if (wrow(c) == 0.0) continue;
            for (int bb = 0; bb < r[1]; ++bb) {
                const double f = vrow(bb) * wrow(c);
                if (f == 0.0) continue;
                for (int aa = 0; aa < r[0]; ++aa) coeff(aa) += f * core_(aa, bb, c);
            }
        }
    } else if (mode == 1) {
        const auto urow = factors_[0].row(a);
        const auto wrow = factors_[2].row(b);
        coeff = Eigen::VectorXd::Zero(r[1]);
        for (int c = 0; c < r[2]; ++c) {
            if (wrow(c) == 0.0) continue;
            for (int bb = 0; bb < r[1]; ++bb) {
                double acc = 0.0;
                for (int aa = 0; aa < r[0]; ++aa) acc += urow(aa) * core_(aa, bb, c);
                coeff(bb) += wrow(c) * acc;
            }
        }
    } else {
        const auto urow = factors_[0].row(a);
        const auto vrow = factors_[1].row(b);
        coeff = Eigen::VectorXd::Zero(r[2]);
        for (int c = 0; c < r[2]; ++c) {
            double acc_c = 0.0;
            for (int bb = 0; bb < r[1]; ++bb) {
                if (vrow(bb) == 0.0) continue;
                double acc = 0.0;
                for (int aa = 0; aa < r[0]; ++aa) acc += urow(aa) * core_(aa, bb, c);
                acc_c += vrow(bb) * acc;
            }
            coeff(c) = acc_c;
        }
    }
    Eigen::Map<Eigen::VectorXd>(out, shape_[mode]) = factors_[mode] * coeff;
}

Dense3 TuckerTensor::block(std::span<const int> I, std::span<const int> J,
                           std::span<const int> K) const {
    Eigen::MatrixXd U(I.size(), ranks_[0]), V(J.size(), ranks_[1]), W(K.size(), ranks_[2]);
    for (std::size_t i = 0; i < I.size(); ++i) U.row(i) = factors_[0].row(I[i]);
    for (std::size_t j = 0; j < J.size(); ++j) V.row(j) = factors_[1].row(J[j]);
    for (std::size_t k = 0; k < K.size(); ++k) W.row(k) = factors_[2].row(K[k]);
    Dense3 g = core_mode_apply(core_, 0, U);
    g = core_mode_apply(g, 1, V);
    g = core_mode_apply(g, 2, W);
    return g;
}

Dense3 TuckerTensor::densify() const {
    Dense3 g = core_mode_apply(core_, 0, factors_[0]);
    g = core_mode_apply(g, 1, factors_[1]);
    g = core_mode_apply(g, 2, factors_[2]);
    return g;
}

TuckerTensor TuckerTensor::rounded(double eps) const {
    if (eps <= 0.0) throw std::invalid_argument("rounded: eps must be positive");
    // Orthogonalize factors, folding the R parts into the core. The working
    // rank never exceeds the mode size.
    Dense3 work = core_;
    std::array<Eigen::MatrixXd, 3> q;
    for (int m = 0; m < 3; ++m) {
        const int rr = std::min(shape_[m], ranks_[m]);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(factors_[m]);
        q[m] = qr.householderQ() * Eigen::MatrixXd::Identity(shape_[m], rr);
        Eigen::MatrixXd r = qr.matrixQR().topRows(rr).triangularView<Eigen::Upper>();
        work = core_mode_apply(work, m, r);
    }
    const double nrm = work.frobenius_norm();
    if (nrm == 0.0) return zero(shape_);

    // Truncated HOSVD of the small core.
    const double budget = eps * nrm / std::sqrt(3.0);
    for (int m = 0; m < 3; ++m) {
        Eigen::MatrixXd M = unfold(work, m);
        Eigen::MatrixXd basis = truncated_basis(M, budget);
        auto d = work.dims();
        d[m] = static_cast<int>(basis.cols());
        work = fold(basis.transpose() * M, m, d);
        q[m] = q[m] * basis;
    }
    return TuckerTensor(std::move(work), std::move(q));
}

double TuckerTensor::norm() const {
    Dense3 work = core_;
    for (int m = 0; m < 3; ++m) {
        const int rr = std::min(shape_[m], ranks_[m]);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(factors_[m]);
        Eigen::MatrixXd r = qr.matrixQR().topRows(rr).triangularView<Eigen::Upper>();
        work = core_mode_apply(work, m, r);
    }
    return work.frobenius_norm();
}

double TuckerTensor::sum() const {
    Dense3 work = core_;
    for (int m = 0; m < 3; ++m) {
        Eigen::MatrixXd colsum = factors_[m].colwise().sum();  // 1 x r
        work = core_mode_apply(work, m, colsum);
    }
    return work(0, 0, 0);
}

TuckerTensor TuckerTensor::mode_apply(int mode, const Eigen::MatrixXd& M) const {
    if (M.cols() != shape_[mode])
        throw std::invalid_argument("mode_apply: matrix column count must match mode size");
    auto factors = factors_;
    factors[mode] = M * factors_[mode];
    return TuckerTensor(core_, std::move(factors));
}

TuckerTensor add(const TuckerTensor& a, const TuckerTensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("add: shape mismatch");
    const auto& ra = a.ranks();
    const auto& rb = b.ranks();
    std::array<int, 3> ranks{ra[0] + rb[0], ra[1] + rb[1], ra[2] + rb[2]};
    std::array<Eigen::MatrixXd, 3> factors;
    for (int m = 0; m < 3; ++m) {
        factors[m].resize(a.shape()[m], ranks[m]);
        factors[m] << a.factor(m), b.factor(m);
    }
    Dense3 core(ranks);
    for (int c = 0; c < ra[2]; ++c)
        for (int bb = 0; bb < ra[1]; ++bb)
            for (int aa = 0; aa < ra[0]; ++aa) core(aa, bb, c) = a.core()(aa, bb, c);
    for (int c = 0; c < rb[2]; ++c)
        for (int bb = 0; bb < rb[1]; ++bb)
            for (int aa = 0; aa < rb[0]; ++aa)
                core(ra[0] + aa, ra[1] + bb, ra[2] + c) = b.core()(aa, bb, c);
    return TuckerTensor(std::move(core), std::move(factors));
}

TuckerTensor scale(const TuckerTensor& a, double c) {
    Dense3 core = a.core();
    for (double& v : core.storage()) v *= c;
    return TuckerTensor(std::move(core), {a.factor(0), a.factor(1), a.factor(2)});
}

TuckerTensor linear_combination(std::span<const TuckerTensor> terms,
                                std::span<const double> coeffs, double eps) {
    if (terms.empty() || terms.size() != coeffs.size())
        throw std::invalid_argument("linear_combination: need matching nonempty inputs");
    TuckerTensor acc = scale(terms[0], coeffs[0]);
    for (std::size_t i = 1; i < terms.size(); ++i) acc = add(acc, scale(terms[i], coeffs[i]));
    return acc.rounded(eps);
}

double inner(const TuckerTensor& a, const TuckerTensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("inner: shape mismatch");
    Dense3 work = b.core();
    for (int m = 0; m < 3; ++m) {
        Eigen::MatrixXd gram = a.factor(m).transpose() * b.factor(m);  // ra x rb
        work = core_mode_apply(work, m, gram);
    }
    double acc = 0.0;
    const auto& ca = a.core();
    for (std::size_t i = 0; i < ca.size(); ++i) acc += ca.data()[i] * work.data()[i];
    return acc;
}

}  // namespace tuckergrid
