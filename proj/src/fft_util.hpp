#pragma once

#include <Eigen/Dense>
#include <complex>

namespace tuckergrid::fft {

/// Orthonormal DST-I applied to each column; involutory (applying twice is
/// the identity). Diagonalizes the 1D second-difference operator with
/// Dirichlet ghost nodes.
Eigen::MatrixXd dst1_columns(const Eigen::MatrixXd& m);

/// Real FFT of each column zero-padded to length fft_len; (fft_len/2+1) rows.
Eigen::MatrixXcd rfft_columns(const Eigen::MatrixXd& m, int fft_len);

/// Inverse of rfft_columns (including the 1/fft_len normalization); returns
/// the first `keep` rows.
Eigen::MatrixXd irfft_columns(const Eigen::MatrixXcd& spec, int fft_len, int keep);

}  // namespace tuckergrid::fft
