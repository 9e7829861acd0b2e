#include "tuckergrid/convolution.hpp"

#include <algorithm>
#include <chrono>
#include "linalg_util.hpp"
#include <iostream>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fft_util.hpp"

namespace tuckergrid {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSqrtPi = 1.7724538509055160273;

// CP-to-Tucker compression of sum_k w_k u_k x v_k x y_k without forming the
// K^3 core: per-mode subspaces from the Gram matrix of the unfolding
// (M1 M1^T = U diag(w) [(V^T V) o (Y^T Y)] diag(w) U^T), then the small core
// accumulated term by term. Directions below the Gram noise floor are always
// dropped, so the effective accuracy bottoms out around 1e-8 relative.
TuckerTensor cp_to_tucker(const std::array<MatrixXd, 3>& factors, const VectorXd& w,
                          double eps) {
    const int K = static_cast<int>(w.size());
    std::array<MatrixXd, 3> gram;
    for (int m = 0; m < 3; ++m) gram[m] = factors[m].transpose() * factors[m];

    double norm2 = 0.0;
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l)
            norm2 += w(k) * w(l) * gram[0](k, l) * gram[1](k, l) * gram[2](k, l);
    norm2 = std::max(norm2, 0.0);
    if (norm2 == 0.0)
        return TuckerTensor::zero({static_cast<int>(factors[0].rows()),
                                   static_cast<int>(factors[1].rows()),
                                   static_cast<int>(factors[2].rows())});
    const double budget2 = eps * eps * norm2 / 3.0;

    std::array<MatrixXd, 3> basis;       // orthonormal subspace per mode
    std::array<MatrixXd, 3> coeff;       // basis^T * factor columns (p x K)
    for (int m = 0; m < 3; ++m) {
        const int n = static_cast<int>(factors[m].rows());
        const int s = std::min(n, K);
        Eigen::HouseholderQR<MatrixXd> qr(factors[m]);
        MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, s);
        MatrixXd r = qr.matrixQR().topRows(s).triangularView<Eigen::Upper>();

        MatrixXd h(K, K);
        const int o1 = (m + 1) % 3, o2 = (m + 2) % 3;
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < K; ++l)
                h(k, l) = w(k) * w(l) * gram[o1](k, l) * gram[o2](k, l);
        MatrixXd s_mat = r * h * r.transpose();
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s_mat);
        // Eigenvalues ascending; find how many of the largest to keep.
        const VectorXd& lam = eig.eigenvalues();
        const double lmax = std::max(lam(s - 1), 0.0);
        const double noise_floor = 8.0 * s * 2.2e-16 * lmax;
        double tail = 0.0;
        int drop = 0;
        while (drop < s - 1) {
            const double l = std::max(lam(drop), 0.0);
            if (l > noise_floor && tail + l > budget2) break;
            tail += std::max(l, 0.0);
            ++drop;
        }
        const int p = s - drop;
        basis[m] = q * eig.eigenvectors().rightCols(p);
        // Reverse columns so the dominant direction comes first.
        basis[m] = basis[m].rowwise().reverse().eval();
        coeff[m] = basis[m].transpose() * factors[m];
    }

    Dense3 core({static_cast<int>(coeff[0].rows()), static_cast<int>(coeff[1].rows()),
                 static_cast<int>(coeff[2].rows())});
    const int p0 = core.dims()[0], p1 = core.dims()[1], p2 = core.dims()[2];
    for (int k = 0; k < K; ++k) {
        const double wk = w(k);
        for (int c = 0; c < p2; ++c) {
            const double yc = wk * coeff[2](c, k);
            if (yc == 0.0) continue;
            for (int b = 0; b < p1; ++b) {
                const double vb = yc * coeff[1](b, k);
                if (vb == 0.0) continue;
                for (int a = 0; a < p0; ++a) core(a, b, c) += vb * coeff[0](a, k);
            }
        }
    }
    return TuckerTensor(std::move(core), std::move(basis));
}

std::string cache_file_name(const Grid& grid, double eps) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "newton_n" << grid.n << "_L" << grid.half_width << "_eps" << eps << ".bin";
    return ss.str();
}

constexpr char kCacheMagic[8] = {'T', 'G', 'K', 'R', 'N', '1', '\n', '\0'};

void write_kernel_cache(const std::string& path, const ConvolutionKernel& kernel) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return;
        auto put = [&out](const void* p, std::size_t bytes) {
            out.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
        };
        put(kCacheMagic, sizeof(kCacheMagic));
        const std::int32_t n = kernel.grid().n;
        const double L = kernel.grid().half_width;
        const double eps = kernel.build_eps();
        put(&n, 4);
        put(&L, 8);
        put(&eps, 8);
        const auto& es = kernel.quadrature();
        const std::int32_t K = static_cast<std::int32_t>(es.nodes.size());
        put(&K, 4);
        put(&es.delta, 8);
        put(&es.dmax, 8);
        put(es.nodes.data(), 8u * K);
        put(es.weights.data(), 8u * K);
        const auto& q = kernel.coefficients();
        const std::int32_t p = q.ranks()[0];
        put(&p, 4);
        put(q.factor(0).data(), 8u * q.factor(0).size());
        put(q.core().data(), 8u * q.core().size());
        if (!out) return;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
}

bool read_kernel_cache(const std::string& path, const Grid& grid, double eps,
                       ConvolutionKernel* out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    auto get = [&in](void* p, std::size_t bytes) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(bytes));
        return static_cast<bool>(in);
    };
    char magic[8];
    if (!get(magic, 8) || std::memcmp(magic, kCacheMagic, 8) != 0) return false;
    std::int32_t n = 0;
    double L = 0, e = 0;
    if (!get(&n, 4) || !get(&L, 8) || !get(&e, 8)) return false;
    if (n != grid.n || L != grid.half_width || e != eps) return false;
    std::int32_t K = 0;
    if (!get(&K, 4) || K <= 0 || K > 100000) return false;
    ExponentialSum es;
    es.eps = eps;
    if (!get(&es.delta, 8) || !get(&es.dmax, 8)) return false;
    es.nodes.resize(K);
    es.weights.resize(K);
    if (!get(es.nodes.data(), 8u * K) || !get(es.weights.data(), 8u * K)) return false;
    std::int32_t p = 0;
    if (!get(&p, 4) || p <= 0 || p > 2 * n - 1) return false;
    MatrixXd factor(2 * n - 1, p);
    if (!get(factor.data(), 8u * factor.size())) return false;
    Dense3 core({p, p, p});
    if (!get(core.data(), 8u * core.size())) return false;
    TuckerTensor q(std::move(core), {factor, factor, factor});
    *out = ConvolutionKernel(grid, std::move(q), std::move(es), eps);
    return true;
}

}  // namespace

double ExponentialSum::evaluate(double rho) const {
    const double r2 = rho * rho;
    double acc = 0.0;
    for (int k = 0; k < nodes.size(); ++k) {
        const double e = -nodes(k) * nodes(k) * r2;
        if (e > -700.0) acc += weights(k) * std::exp(e);
    }
    return acc;
}

ExponentialSum ExponentialSum::inverse_distance(double delta, double dmax, double eps) {
    if (!(delta > 0.0) || !(dmax > delta) || !(eps > 0.0))
        throw std::invalid_argument("ExponentialSum: need 0 < delta < dmax, eps > 0");
    // 1/rho = (2/sqrt(pi)) int exp(s - rho^2 exp(2s)) ds, trapezoid in s.
    // Truncation bounds follow from the integrand tails; the step is halved
    // until the sampled relative error meets the target.
    const double logeps = std::log(eps);
    const double s_min = std::log(eps * kSqrtPi / 8.0 / dmax);
    const double umax = std::sqrt(std::max(-logeps + 3.0, 4.0));
    const double s_max = std::log(umax / delta);

    std::vector<double> test_rho;
    const int n_test = 400;
    for (int i = 0; i <= n_test; ++i)
        test_rho.push_back(delta * std::pow(dmax / delta, double(i) / n_test));

    double tau = 3.14159265358979323846 * 3.14159265358979323846 /
                 (2.0 * std::max(4.0, -logeps + 2.0));
    ExponentialSum best;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const int K = static_cast<int>(std::ceil((s_max - s_min) / tau)) + 1;
        ExponentialSum es;
        es.delta = delta;
        es.dmax = dmax;
        es.eps = eps;
        es.nodes.resize(K);
        es.weights.resize(K);
        for (int k = 0; k < K; ++k) {
            const double s = s_min + k * tau;
            es.nodes(k) = std::exp(s);
            es.weights(k) = 2.0 / kSqrtPi * tau * es.nodes(k);
        }
        double worst = 0.0;
        for (double rho : test_rho) {
            const double rel = std::abs(es.evaluate(rho) * rho - 1.0);
            worst = std::max(worst, rel);
        }
        best = std::move(es);
        if (worst <= 0.9 * eps) return best;
        tau *= 0.5;
    }
    throw std::runtime_error(
        "ExponentialSum: sinc quadrature failed to reach the requested accuracy");
}

double cell_pair_integral(double t, double c, double h) {
    // int_{-h}^{h} (h - |u|) exp(-t^2 (u + c)^2) du, c >= 0.
    const double a = t * (c - h);
    const double b = t * c;
    const double d = t * (c + h);
    double erf_da, erf_dba;  // erf(d)-erf(a), erf(d)-2erf(b)+erf(a)
    if (a >= 0.0) {
        // Far cells: difference of erfc values avoids cancellation of erf ~ 1.
        const double ea = std::erfc(a), eb = std::erfc(b), ed = std::erfc(d);
        erf_da = ea - ed;
        erf_dba = 2.0 * eb - ea - ed;
    } else {
        erf_da = std::erf(d) - std::erf(a);
        erf_dba = std::erf(d) - 2.0 * std::erf(b) + std::erf(a);
    }
    const double ga = a * a > 700.0 ? 0.0 : std::exp(-a * a);
    const double gb = b * b > 700.0 ? 0.0 : std::exp(-b * b);
    const double gd = d * d > 700.0 ? 0.0 : std::exp(-d * d);
    return kSqrtPi / (2.0 * t) * (h * erf_da + c * erf_dba) +
           (ga + gd - 2.0 * gb) / (2.0 * t * t);
}

ConvolutionKernel::ConvolutionKernel(Grid grid, TuckerTensor coefficients,
                                     ExponentialSum quadrature, double build_eps)
    : grid_(grid),
      coefficients_(std::move(coefficients)),
      quadrature_(std::move(quadrature)),
      build_eps_(build_eps) {
    // Pre-pad the factor columns into the circular layout and cache spectra.
    const int n = grid_.n;
    const int m = 2 * n;
    const auto& f = coefficients_.factor(0);
    MatrixXd padded = MatrixXd::Zero(m, f.cols());
    for (int c = 0; c < f.cols(); ++c) {
        for (int d = 0; d < n; ++d) padded(d, c) = f(d + n - 1, c);
        for (int d = -(n - 1); d < 0; ++d) padded(m + d, c) = f(d + n - 1, c);
    }
    spectrum_ = fft::rfft_columns(padded, m);
}

double ConvolutionKernel::exact_coefficient(int dx, int dy, int dz) const {
    const auto& es = quadrature_;
    const double h = grid_.step;
    double acc = 0.0;
    for (int k = 0; k < es.nodes.size(); ++k) {
        const double t = es.nodes(k);
        const double g = cell_pair_integral(t, std::abs(dx) * h, h) *
                         cell_pair_integral(t, std::abs(dy) * h, h) *
                         cell_pair_integral(t, std::abs(dz) * h, h);
        acc += es.weights(k) * g;
    }
    return acc;
}

ConvolutionKernel build_newton_kernel(const Grid& grid, double eps,
                                      const std::string& cache_dir) {
    if (eps <= 0.0) throw std::invalid_argument("build_newton_kernel: eps > 0 required");
    std::string cache_path;
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        cache_path = (std::filesystem::path(cache_dir) / cache_file_name(grid, eps)).string();
        ConvolutionKernel cached;
        if (read_kernel_cache(cache_path, grid, eps, &cached)) return cached;
    }

    const int n = grid.n;
    const double h = grid.step;
    // The sub-delta part of the self-cell integral contributes ~3.3 (delta/h)^2
    // relative; pick delta accordingly. The upper end is grid-independent so
    // that kernels built at the same h agree exactly across grid sizes.
    const double delta = h * std::max(0.55 * std::sqrt(eps), 1e-8);
    const double dmax = 2048.0;
    if (std::sqrt(3.0) * 2.0 * grid.half_width > dmax)
        throw std::invalid_argument("build_newton_kernel: box too large for the quadrature range");
    ExponentialSum es = ExponentialSum::inverse_distance(delta, dmax, eps);

    const int K = static_cast<int>(es.nodes.size());
    MatrixXd factor(2 * n - 1, K);
    for (int k = 0; k < K; ++k) {
        const double t = es.nodes(k);
        for (int d = 0; d < n; ++d) {
            const double g = cell_pair_integral(t, d * h, h);
            factor(n - 1 + d, k) = g;
            factor(n - 1 - d, k) = g;
        }
    }
    TuckerTensor q = cp_to_tucker({factor, factor, factor}, es.weights, eps);
    ConvolutionKernel kernel(grid, std::move(q), std::move(es), eps);
    if (!cache_path.empty()) write_kernel_cache(cache_path, kernel);
    return kernel;
}

TuckerTensor conv(const ConvolutionKernel& kernel, const TuckerTensor& f, double eps) {
    const bool profile = std::getenv("TUCKERGRID_PROFILE_CONV") != nullptr;
    auto now = [] { return std::chrono::steady_clock::now(); };
    auto msec = [](auto a, auto b) { return std::chrono::duration<double, std::milli>(b - a).count(); };
    auto tc0 = now();
    const int n = kernel.grid().n;
    if (f.shape() != std::array<int, 3>{n, n, n})
        throw std::invalid_argument("conv: tensor is not on the kernel grid");
    if (eps <= 0.0) throw std::invalid_argument("conv: eps > 0 required");
    const double fnorm = f.norm();
    if (fnorm == 0.0) return TuckerTensor::zero(f.shape());
    // Trim the input first: the pairwise column count rq * rf drives the cost.
    const TuckerTensor f_trim = f.rounded(eps / 8.0);
    const TuckerTensor& fc = f_trim;

    const auto& q = kernel.coefficients();
    const int rq = q.ranks()[0];
    const int m = 2 * n;
    const auto& qspec = kernel.factor_spectrum();

    // Mode-m factor columns of the (uncompressed) result: all pairwise 1D
    // convolutions of kernel columns with f's factor columns, pair index
    // c = kq + rq * kf. Columns are scaled by the Frobenius norms of the
    // matching core slices before truncation, so the kept subspace reflects
    // each direction's weight in the final contraction.
    auto slice_norms = [](const Dense3& core, int mode) {
        const auto& d = core.dims();
        VectorXd out = VectorXd::Zero(d[mode]);
        for (int c = 0; c < d[2]; ++c)
            for (int b = 0; b < d[1]; ++b)
                for (int a = 0; a < d[0]; ++a) {
                    const double v = core(a, b, c);
                    const int idx = mode == 0 ? a : (mode == 1 ? b : c);
                    out(idx) += v * v;
                }
        return out.cwiseSqrt().eval();
    };
    std::array<MatrixXd, 3> basis;
    std::array<MatrixXd, 3> mixer;  // s_m x (rq * rf_m)
    for (int mode = 0; mode < 3; ++mode) {
        const int rf = fc.ranks()[mode];
        Eigen::MatrixXcd fspec = fft::rfft_columns(fc.factor(mode), m);
        Eigen::MatrixXcd prod(m / 2 + 1, rq * rf);
        for (int kf = 0; kf < rf; ++kf)
            for (int kq = 0; kq < rq; ++kq)
                prod.col(kq + rq * kf) = qspec.col(kq).cwiseProduct(fspec.col(kf));
        MatrixXd cols = fft::irfft_columns(prod, m, n);
        const VectorXd wq = slice_norms(q.core(), mode);
        const VectorXd wf = slice_norms(fc.core(), mode);
        VectorXd weight(rq * rf);
        for (int kf = 0; kf < rf; ++kf)
            for (int kq = 0; kq < rq; ++kq)
                weight(kq + rq * kf) = std::max(wq(kq) * wf(kf), 1e-300);
        MatrixXd scaled = cols * weight.asDiagonal();
        const double budget = eps / 2.0 * scaled.norm() / std::sqrt(3.0);
        basis[mode] = linalg::svd_basis(scaled, budget, /*allow_gram=*/eps >= 1e-7);
        mixer[mode] = basis[mode].transpose() * cols;
    }

    auto tc1 = now();
    // Core contraction: E = (R1 x R2 x R3) (Gq x Gf) without forming the
    // Kronecker core; R1 is contracted first so intermediates stay small.
    const auto& gq = q.core();
    const auto& gf = fc.core();
    const int rf0 = fc.ranks()[0], rf1 = fc.ranks()[1], rf2 = fc.ranks()[2];
    const int s0 = static_cast<int>(basis[0].cols());
    const int s1 = static_cast<int>(basis[1].cols());
    const int s2 = static_cast<int>(basis[2].cols());

    // A[alpha, bq, cq; af] = sum_aq R1[alpha, aq + rq af] Gq[aq, bq, cq]
    Eigen::Map<const MatrixXd> gq1(gq.data(), rq, static_cast<Eigen::Index>(rq) * rq);
    MatrixXd a_perm(static_cast<Eigen::Index>(s0) * rq * rq, rf0);
    for (int af = 0; af < rf0; ++af) {
        MatrixXd part = mixer[0].middleCols(static_cast<Eigen::Index>(af) * rq, rq) * gq1;
        for (int bc = 0; bc < rq * rq; ++bc)
            for (int al = 0; al < s0; ++al)
                a_perm(al + static_cast<Eigen::Index>(s0) * bc, af) = part(al, bc);
    }
    // B[alpha, bq, cq, bf, cf] = sum_af A[alpha, bq, cq; af] Gf[af, bf, cf]
    Eigen::Map<const MatrixXd> gf1(gf.data(), rf0, static_cast<Eigen::Index>(rf1) * rf2);
    MatrixXd b = a_perm * gf1;  // (s0 rq rq) x (rf1 rf2)

    // C[alpha, cq, cf, beta] = sum_{bq,bf} B[...] R2[beta, bq + rq bf]
    MatrixXd c_perm(static_cast<Eigen::Index>(s0) * rq * rf2, static_cast<Eigen::Index>(rq) * rf1);
    for (int cf = 0; cf < rf2; ++cf)
        for (int bf = 0; bf < rf1; ++bf)
            for (int cq = 0; cq < rq; ++cq)
                for (int bq = 0; bq < rq; ++bq)
                    for (int al = 0; al < s0; ++al)
                        c_perm(al + static_cast<Eigen::Index>(s0) * (cq + static_cast<Eigen::Index>(rq) * cf),
                               bq + static_cast<Eigen::Index>(rq) * bf) =
                            b(al + static_cast<Eigen::Index>(s0) * (bq + static_cast<Eigen::Index>(rq) * cq),
                              bf + static_cast<Eigen::Index>(rf1) * cf);
    MatrixXd c = c_perm * mixer[1].transpose();  // (s0 rq rf2) x s1

    // E[alpha, beta, gamma] = sum_{cq,cf} C[alpha, cq, cf, beta] R3[gamma, cq + rq cf]
    MatrixXd d_perm(static_cast<Eigen::Index>(s0) * s1, static_cast<Eigen::Index>(rq) * rf2);
    for (int cf = 0; cf < rf2; ++cf)
        for (int cq = 0; cq < rq; ++cq)
            for (int be = 0; be < s1; ++be)
                for (int al = 0; al < s0; ++al)
                    d_perm(al + static_cast<Eigen::Index>(s0) * be,
                           cq + static_cast<Eigen::Index>(rq) * cf) =
                        c(al + static_cast<Eigen::Index>(s0) *
                                   (cq + static_cast<Eigen::Index>(rq) * cf),
                          be);
    MatrixXd e = d_perm * mixer[2].transpose();  // (s0 s1) x s2

    auto tc2 = now();
    Dense3 core({s0, s1, s2});
    std::copy(e.data(), e.data() + e.size(), core.data());
    TuckerTensor w(std::move(core), {basis[0], basis[1], basis[2]});
    const double h3 = kernel.grid().cell_volume();
    TuckerTensor out = scale(w.rounded(eps / 4.0), 1.0 / h3);
    if (profile)
        std::cerr << "      conv: rf=" << fc.max_rank() << " rq=" << rq
                  << " s=(" << s0 << "," << s1 << "," << s2 << ")"
                  << " fft+svd=" << msec(tc0, tc1) << " core=" << msec(tc1, tc2)
                  << " round=" << msec(tc2, now()) << " ms\n";
    return out;
}

TuckerTensor coulomb_potential(const ConvolutionKernel& kernel, const TuckerTensor& rho,
                               double eps) {
    return conv(kernel, rho, eps);
}

TuckerTensor external_potential(const Molecule& mol, const Grid& grid, double eps) {
    if (mol.nuclei.empty()) throw std::invalid_argument("external_potential: no nuclei");
    const double L = grid.half_width;
    for (const auto& nuc : mol.nuclei)
        for (double x : nuc.position)
            if (std::abs(x) > L)
                throw std::invalid_argument("external_potential: nucleus outside the box");

    const double delta = grid.step / 10.0;
    const double dmax = std::sqrt(3.0) * 2.0 * L;
    ExponentialSum es = ExponentialSum::inverse_distance(delta, dmax, eps);
    const int K = static_cast<int>(es.nodes.size());
    const int n = grid.n;
    const double sub_eps = eps / (2.0 * std::sqrt(double(mol.nuclei.size())));

    TuckerTensor total = TuckerTensor::zero({n, n, n});
    for (const auto& nuc : mol.nuclei) {
        std::array<MatrixXd, 3> factors;
        for (int m = 0; m < 3; ++m) {
            factors[m].resize(n, K);
            for (int k = 0; k < K; ++k) {
                const double t2 = es.nodes(k) * es.nodes(k);
                for (int i = 0; i < n; ++i) {
                    const double dx = grid.node(i) - nuc.position[m];
                    const double ex = -t2 * dx * dx;
                    factors[m](i, k) = ex > -700.0 ? std::exp(ex) : 0.0;
                }
            }
        }
        VectorXd w = -nuc.charge * es.weights;
        total = add(total, cp_to_tucker(factors, w, sub_eps));
    }
    return total.rounded(eps / 2.0);
}

}  // namespace tuckergrid
