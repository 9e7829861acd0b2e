#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tuckergrid/tucker.hpp"

namespace tuckergrid {

/// A tensor defined only through element evaluation. Implementations must be
/// pure: repeated evaluation at the same index returns the identical value.
class ElementOracle {
public:
    virtual ~ElementOracle() = default;
    virtual std::array<int, 3> shape() const = 0;
    virtual double eval(int i, int j, int k) const = 0;

    /// Mode-m fiber with the other two indices fixed (same convention as
    /// TuckerTensor::fiber). Default falls back to per-element eval.
    virtual void eval_fiber(int mode, int a, int b, double* out) const;
    /// Subtensor at the given index lists. Default falls back to eval.
    virtual void eval_block(std::span<const int> I, std::span<const int> J,
                            std::span<const int> K, Dense3& out) const;
};

/// Oracle wrapping a plain index function.
class LambdaOracle final : public ElementOracle {
public:
    LambdaOracle(std::array<int, 3> shape, std::function<double(int, int, int)> f)
        : shape_(shape), f_(std::move(f)) {}
    std::array<int, 3> shape() const override { return shape_; }
    double eval(int i, int j, int k) const override { return f_(i, j, k); }

private:
    std::array<int, 3> shape_;
    std::function<double(int, int, int)> f_;
};

/// Elementwise function of one or more Tucker tensors (plus the index, so
/// index-dependent scalings can be expressed). Fibers and blocks of the
/// inputs are evaluated in O(r^3 + n r) each, which keeps the cross element
/// budget at O(r^3 + 3 n r) overall.
class TensorFunctionOracle final : public ElementOracle {
public:
    using Func = std::function<double(int, int, int, const double*)>;

    TensorFunctionOracle(std::vector<const TuckerTensor*> inputs, Func f);
    std::array<int, 3> shape() const override { return shape_; }
    double eval(int i, int j, int k) const override;
    void eval_fiber(int mode, int a, int b, double* out) const override;
    void eval_block(std::span<const int> I, std::span<const int> J,
                    std::span<const int> K, Dense3& out) const override;

private:
    std::vector<const TuckerTensor*> inputs_;
    Func f_;
    std::array<int, 3> shape_;
};

struct CrossOptions {
    double eps = 1e-8;      // relative residual target
    int max_rank = 0;       // per-mode pivot cap; 0 = min(mode size, 256)
    std::uint64_t seed = 0; // pivot/validation sampling seed
};

struct CrossReport {
    long long evaluations = 0;  // oracle elements touched
    std::array<int, 3> ranks{0, 0, 0};
    double residual_estimate = 0.0;  // relative, on held-out samples
    bool converged = false;
    int sweeps = 0;
};

/// Rank-adaptive fiber cross approximation with maxvol pivoting.
/// Residuals are estimated on held-out random fibers (>= 100 * current rank
/// sampled indices per sweep); new pivots come from the largest residuals,
/// first index winning exact ties.
TuckerTensor cross(const ElementOracle& oracle, const CrossOptions& options,
                   CrossReport* report = nullptr);

/// Elementwise product a .* b via cross (avoids the exact-product rank blowup).
TuckerTensor hadamard(const TuckerTensor& a, const TuckerTensor& b, double eps,
                      std::uint64_t seed = 0, CrossReport* report = nullptr);

/// Elementwise scalar function f(a_{ijk}) via cross.
TuckerTensor map_elementwise(const TuckerTensor& a,
                             const std::function<double(double)>& f, double eps,
                             std::uint64_t seed = 0, CrossReport* report = nullptr);

}  // namespace tuckergrid
