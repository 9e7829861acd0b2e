#pragma once

#include <Eigen/Dense>

#include <string>

#include "tuckergrid/molecule.hpp"
#include "tuckergrid/tucker.hpp"

namespace tuckergrid {

/// Separable approximation 1/rho ~ sum_k w_k exp(-t_k^2 rho^2), uniformly
/// accurate to relative `eps` on [delta, dmax]. Built by sinc quadrature on
/// the Gaussian integral representation of 1/rho, with the step refined until
/// the target accuracy is verified on a test grid.
struct ExponentialSum {
    Eigen::VectorXd nodes;    // t_k
    Eigen::VectorXd weights;  // w_k, all positive
    double delta = 0.0;
    double dmax = 0.0;
    double eps = 0.0;

    double evaluate(double rho) const;
    static ExponentialSum inverse_distance(double delta, double dmax, double eps);
};

/// 1D Galerkin building block: integral of (h-|u|) exp(-t^2 (u+c)^2) over
/// [-h, h], i.e. the cell-pair overlap of one Gaussian factor at center
/// separation c >= 0.
double cell_pair_integral(double t, double c, double h);

/// Galerkin coefficients q_d of the Newton kernel 1/|r-r'| over pairs of h^3
/// cells, stored as a Tucker tensor over the difference index range
/// -(n-1)..n-1 per mode (entry d at position d+n-1). All three factor
/// matrices are identical by symmetry.
class ConvolutionKernel {
public:
    ConvolutionKernel() = default;
    ConvolutionKernel(Grid grid, TuckerTensor coefficients, ExponentialSum quadrature,
                      double build_eps);

    const Grid& grid() const { return grid_; }
    const TuckerTensor& coefficients() const { return coefficients_; }
    const ExponentialSum& quadrature() const { return quadrature_; }
    double build_eps() const { return build_eps_; }

    /// Quadrature evaluation of a single q entry, bypassing the Tucker
    /// compression. Depends only on (h, eps), not on the grid size.
    double exact_coefficient(int dx, int dy, int dz) const;

    /// Spectra of the kernel factor columns, zero-padded to length 2n in the
    /// circular layout used by conv(); identical for all three modes.
    const Eigen::MatrixXcd& factor_spectrum() const { return spectrum_; }

private:
    Grid grid_;
    TuckerTensor coefficients_;
    ExponentialSum quadrature_;
    double build_eps_ = 0.0;
    Eigen::MatrixXcd spectrum_;
};

/// Build (or load from `cache_dir`) the Newton-kernel Galerkin tensor at
/// relative accuracy eps. The cache key is (n, L, eps); files are written
/// atomically, and unreadable cache entries trigger a silent rebuild.
ConvolutionKernel build_newton_kernel(const Grid& grid, double eps,
                                      const std::string& cache_dir = "");

/// Low-rank approximation of the Newton potential of f:
///   w(r_i) = integral f(r') / |r_i - r'| dr'  ~  (1/h^3) sum_j f_j q_{i-j},
/// computed by per-mode FFT convolutions of the factor columns followed by
/// recompression. Relative accuracy eps.
TuckerTensor conv(const ConvolutionKernel& kernel, const TuckerTensor& f, double eps);

/// Coulomb potential of an electron density (conv with physical scaling
/// already included; rho is given by node values).
TuckerTensor coulomb_potential(const ConvolutionKernel& kernel, const TuckerTensor& rho,
                               double eps);

/// Nuclear attraction potential -sum_a Z_a / |r - R_a| sampled at grid nodes
/// through the separable exponential-sum representation (valid distances
/// [h/10, sqrt(3)*2L]; closer nodes receive the finite exponential-sum value).
TuckerTensor external_potential(const Molecule& mol, const Grid& grid, double eps);

}  // namespace tuckergrid
