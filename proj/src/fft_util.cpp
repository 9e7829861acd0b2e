#include "fft_util.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace tuckergrid::fft {

namespace {

// Plans are created unaligned so they can run on any buffer of the right
// size; creation is serialized (FFTW planning is not thread-safe).
std::mutex plan_mutex;

fftw_plan dst_plan(int n) {
    static std::map<int, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> in(n), out(n);
    fftw_plan p = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_RODFT00,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[n] = p;
    return p;
}

fftw_plan r2c_plan(int n) {
    static std::map<int, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(n, in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[n] = p;
    return p;
}

fftw_plan c2r_plan(int n) {
    static std::map<int, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<fftw_complex> in(n / 2 + 1);
    std::vector<double> out(n);
    fftw_plan p = fftw_plan_dft_c2r_1d(n, in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[n] = p;
    return p;
}

}  // namespace

Eigen::MatrixXd dst1_columns(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    fftw_plan plan = dst_plan(n);
    const double scale = 1.0 / std::sqrt(2.0 * (n + 1));
    Eigen::MatrixXd out(n, cols);
    std::vector<double> in_buf(n), out_buf(n);
    for (int c = 0; c < cols; ++c) {
        for (int i = 0; i < n; ++i) in_buf[i] = m(i, c);
        fftw_execute_r2r(plan, in_buf.data(), out_buf.data());
        for (int i = 0; i < n; ++i) out(i, c) = scale * out_buf[i];
    }
    return out;
}

Eigen::MatrixXcd rfft_columns(const Eigen::MatrixXd& m, int fft_len) {
    if (m.rows() > fft_len)
        throw std::invalid_argument("rfft_columns: fft_len smaller than input");
    const int cols = static_cast<int>(m.cols());
    const int nc = fft_len / 2 + 1;
    fftw_plan plan = r2c_plan(fft_len);
    Eigen::MatrixXcd out(nc, cols);
    std::vector<double> in_buf(fft_len);
    std::vector<fftw_complex> out_buf(nc);
    for (int c = 0; c < cols; ++c) {
        std::fill(in_buf.begin(), in_buf.end(), 0.0);
        for (int i = 0; i < m.rows(); ++i) in_buf[i] = m(i, c);
        fftw_execute_dft_r2c(plan, in_buf.data(), out_buf.data());
        for (int i = 0; i < nc; ++i)
            out(i, c) = std::complex<double>(out_buf[i][0], out_buf[i][1]);
    }
    return out;
}

Eigen::MatrixXd irfft_columns(const Eigen::MatrixXcd& spec, int fft_len, int keep) {
    const int nc = fft_len / 2 + 1;
    if (spec.rows() != nc)
        throw std::invalid_argument("irfft_columns: spectrum size mismatch");
    const int cols = static_cast<int>(spec.cols());
    fftw_plan plan = c2r_plan(fft_len);
    Eigen::MatrixXd out(keep, cols);
    std::vector<fftw_complex> in_buf(nc);
    std::vector<double> out_buf(fft_len);
    const double scale = 1.0 / fft_len;
    for (int c = 0; c < cols; ++c) {
        for (int i = 0; i < nc; ++i) {
            in_buf[i][0] = spec(i, c).real();
            in_buf[i][1] = spec(i, c).imag();
        }
        fftw_execute_dft_c2r(plan, in_buf.data(), out_buf.data());
        for (int i = 0; i < keep; ++i) out(i, c) = scale * out_buf[i];
    }
    return out;
}

}  // namespace tuckergrid::fft
