#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace tuckergrid {

/// Dense 3-way array with column-major layout (first index fastest).
/// Used for small desk-scale tensors: test oracles, HOSVD input, cross blocks.
class Dense3 {
public:
    Dense3() : dims_{0, 0, 0} {}
    explicit Dense3(std::array<int, 3> dims)
        : dims_(dims),
          data_(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], 0.0) {}

    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims_[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_[1]) * k);
    }

    const std::array<int, 3>& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& storage() { return data_; }
    const std::vector<double>& storage() const { return data_; }

    double frobenius_norm() const;
    double max_abs() const;

private:
    std::array<int, 3> dims_;
    std::vector<double> data_;
};

/// Uniform tensor-product grid on [-L, L]^3 with n cells per mode.
/// Galerkin cells are h^3 cubes centered at the nodes, so the primary node
/// coordinates are cell centers -L + (k + 1/2) h; the raw lattice
/// -L + k h is exposed as well.
struct Grid {
    double half_width = 0.0;  // L, bohr
    int n = 0;                // points per mode
    double step = 0.0;        // h = 2L/n

    Grid() = default;
    Grid(double L, int n_points);

    /// Cell-center coordinate of node k (the solver's convention).
    double node(int k) const { return -half_width + (k + 0.5) * step; }
    /// Raw lattice coordinate -L + k h.
    double raw_node(int k) const { return -half_width + k * step; }
    /// All cell-center coordinates of one mode.
    Eigen::VectorXd nodes() const;
    double cell_volume() const { return step * step * step; }

    bool operator==(const Grid& other) const {
        return n == other.n && half_width == other.half_width;
    }
};

/// Rank-(r1,r2,r3) Tucker representation of an n1 x n2 x n3 tensor:
///   a_{ijk} = sum_{abc} core_{abc} U_{ia} V_{jb} W_{kc}.
/// Values are immutable after construction; all operations return new tensors.
class TuckerTensor {
public:
    TuckerTensor() = default;
    TuckerTensor(std::array<int, 3> shape, std::array<int, 3> ranks);
    TuckerTensor(Dense3 core, std::array<Eigen::MatrixXd, 3> factors);

    /// Zero tensor in canonical rank-(1,1,1) form.
    static TuckerTensor zero(std::array<int, 3> shape);
    /// Rank-1 tensor u x v x w.
    static TuckerTensor rank_one(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                 const Eigen::VectorXd& w);
    /// ST-HOSVD with per-mode truncation budget eps/sqrt(3) (relative).
    static TuckerTensor from_dense(const Dense3& a, double eps);

    const std::array<int, 3>& shape() const { return shape_; }
    const std::array<int, 3>& ranks() const { return ranks_; }
    int max_rank() const { return std::max(ranks_[0], std::max(ranks_[1], ranks_[2])); }
    const Eigen::MatrixXd& factor(int mode) const { return factors_[mode]; }
    const Dense3& core() const { return core_; }
    bool same_shape(const TuckerTensor& other) const { return shape_ == other.shape_; }

    /// Single element; O(r1 r2 r3).
    double value(int i, int j, int k) const;
    /// Mode-m fiber: the n values with the other two indices fixed.
    /// mode 0: (:, a, b); mode 1: (a, :, b); mode 2: (a, b, :).
    void fiber(int mode, int a, int b, double* out) const;
    /// Subtensor at the given index lists; O(|I| r^3 + |I||J||K| r).
    Dense3 block(std::span<const int> I, std::span<const int> J,
                 std::span<const int> K) const;
    Dense3 densify() const;

    /// SVD-based rounding: QR-orthogonalize factors, then truncated HOSVD of
    /// the small core with per-mode budget eps/sqrt(3) of the Frobenius norm.
    TuckerTensor rounded(double eps) const;
    /// Frobenius norm, computed stably through factor orthogonalization.
    double norm() const;
    /// Sum of all elements (contraction with the all-ones tensor).
    double sum() const;

    /// Apply a matrix to one factor: replaces factor(mode) by M * factor(mode).
    /// M may be rectangular (p x n), changing the mode size to p.
    TuckerTensor mode_apply(int mode, const Eigen::MatrixXd& M) const;

private:
    std::array<int, 3> shape_{0, 0, 0};
    std::array<int, 3> ranks_{0, 0, 0};
    std::array<Eigen::MatrixXd, 3> factors_;
    Dense3 core_;
};

TuckerTensor add(const TuckerTensor& a, const TuckerTensor& b);
TuckerTensor scale(const TuckerTensor& a, double c);
/// sum_i coeffs[i] * terms[i], rounded at eps.
TuckerTensor linear_combination(std::span<const TuckerTensor> terms,
                                std::span<const double> coeffs, double eps);
/// <a, b> = sum_{ijk} a_{ijk} b_{ijk}, via factor Gram matrices; O(r^4).
double inner(const TuckerTensor& a, const TuckerTensor& b);

}  // namespace tuckergrid
