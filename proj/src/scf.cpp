#include "tuckergrid/scf.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "tuckergrid/cross.hpp"
#include "tuckergrid/lda.hpp"

namespace tuckergrid {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLambdaCap = -0.05;

std::vector<const TuckerTensor*> pointers(const std::vector<TuckerTensor>& ts) {
    std::vector<const TuckerTensor*> p;
    p.reserve(ts.size());
    for (const auto& t : ts) p.push_back(&t);
    return p;
}

}  // namespace

ScfContext::ScfContext(Molecule mol, Grid grid, ScfOptions options)
    : mol_(std::move(mol)), grid_(grid), options_(options) {
    if (options_.eps < 1e-12 || options_.eps > 1e-3)
        throw std::invalid_argument("ScfContext: eps must lie in [1e-12, 1e-3]");
    if (mol_.n_orbitals < 1) throw std::invalid_argument("ScfContext: need N >= 1");
    if (options_.mode == ScfMode::SingleElectron) {
        if (mol_.n_orbitals != 1)
            throw std::invalid_argument("ScfContext: single-electron mode needs N = 1");
        mol_.occupancy = 1.0;
    }
    const double kernel_eps = std::max(options_.eps * 1e-2, 1e-9);
    kernel_ = build_newton_kernel(grid_, kernel_eps, options_.kernel_cache_dir);
    v_ext_ = external_potential(mol_, grid_, std::min(round_eps(), 1e-8));
}

TuckerTensor density_of(const ScfContext& ctx, const std::vector<TuckerTensor>& orbitals) {
    const double occ = ctx.molecule().occupancy;
    TensorFunctionOracle oracle(pointers(orbitals),
                                [occ, n = orbitals.size()](int, int, int, const double* v) {
                                    double s = 0.0;
                                    for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
                                    return occ * s;
                                });
    CrossOptions opt;
    opt.eps = ctx.round_eps();
    opt.seed = ctx.next_seed();
    return cross(oracle, opt);
}

TuckerTensor local_potential(const ScfContext& ctx, const TuckerTensor& rho) {
    TuckerTensor v_coul = coulomb_potential(ctx.kernel(), rho, ctx.round_eps());
    return add(ctx.v_ext(), v_coul).rounded(ctx.round_eps());
}

ExchangeOperator build_exchange(const ScfContext& ctx,
                                const std::vector<TuckerTensor>& orbitals) {
    const int n = static_cast<int>(orbitals.size());
    ExchangeOperator ex;
    ex.pair_products.resize(n);
    ex.pair_potentials.resize(n);
    for (int i = 0; i < n; ++i) {
        ex.pair_products[i].resize(i + 1);
        ex.pair_potentials[i].resize(i + 1);
        for (int j = 0; j <= i; ++j) {
            TuckerTensor p =
                hadamard(orbitals[i], orbitals[j], ctx.round_eps(), ctx.next_seed());
            ex.pair_potentials[i][j] = conv(ctx.kernel(), p, ctx.round_eps());
            ex.pair_products[i][j] = std::move(p);
        }
    }
    return ex;
}

TuckerTensor apply_potential_ks(const ScfContext& ctx, const TuckerTensor& v_local,
                                const TuckerTensor& rho, const TuckerTensor& phi) {
    long long* clamp = &ctx.xc_clamp_count;
    TensorFunctionOracle oracle({&v_local, &rho, &phi},
                                [clamp](int, int, int, const double* v) {
                                    double r = v[1];
                                    if (r < 0.0) {
                                        ++*clamp;
                                        r = 0.0;
                                    }
                                    return (v[0] + lda::xc_potential(r)) * v[2];
                                });
    CrossOptions opt;
    opt.eps = ctx.round_eps();
    opt.seed = ctx.next_seed();
    return cross(oracle, opt);
}

TuckerTensor apply_potential_hf(const ScfContext& ctx, const TuckerTensor& v_local,
                                const std::vector<TuckerTensor>& orbitals,
                                const ExchangeOperator& exchange, int i) {
    const int n = static_cast<int>(orbitals.size());
    std::vector<const TuckerTensor*> inputs;
    inputs.reserve(2 + 2 * n);
    inputs.push_back(&v_local);
    inputs.push_back(&orbitals[i]);
    for (int j = 0; j < n; ++j) inputs.push_back(&orbitals[j]);
    for (int j = 0; j < n; ++j) inputs.push_back(&exchange.potential(j, i));
    TensorFunctionOracle oracle(inputs, [n](int, int, int, const double* v) {
        double acc = v[0] * v[1];
        for (int j = 0; j < n; ++j) acc -= v[2 + j] * v[2 + n + j];
        return acc;
    });
    CrossOptions opt;
    opt.eps = ctx.round_eps();
    opt.seed = ctx.next_seed();
    return cross(oracle, opt);
}

std::vector<TuckerTensor> green_step(const ScfContext& ctx,
                                     const std::vector<double>& lambdas,
                                     const std::vector<TuckerTensor>& v_phi) {
    if (lambdas.size() != v_phi.size())
        throw std::invalid_argument("green_step: lambda/orbital count mismatch");
    std::vector<TuckerTensor> phi_hat;
    phi_hat.reserve(v_phi.size());
    for (std::size_t i = 0; i < v_phi.size(); ++i) {
        double lam = lambdas[i];
        if (lam >= 0.0) {
            if (ctx.options().verbose)
                std::cerr << "green_step: capping nonnegative lambda_" << i << " at "
                          << kLambdaCap << "\n";
            lam = kLambdaCap;
        }
        ShiftedLaplacian op(ctx.grid(), 2.0 * lam);
        TuckerTensor u = solve(op, v_phi[i], ctx.round_eps(), ctx.next_seed());
        phi_hat.push_back(scale(u, -2.0));
    }
    return phi_hat;
}

Orthogonalized orthogonalize(const ScfContext& ctx,
                             const std::vector<TuckerTensor>& phi_hat) {
    const int n = static_cast<int>(phi_hat.size());
    MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            gram(i, j) = inner_h3(ctx, phi_hat[i], phi_hat[j]);
            gram(j, i) = gram(i, j);
        }
    Eigen::LLT<MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        std::ostringstream ss;
        ss << "orthogonalize: Gram matrix not positive definite (orbital collapse):\n"
           << gram;
        throw std::runtime_error(ss.str());
    }
    MatrixXd l = llt.matrixL();
    MatrixXd linv_t =
        l.transpose().triangularView<Eigen::Upper>().solve(MatrixXd::Identity(n, n));

    Orthogonalized out;
    out.gram = std::move(gram);
    out.cholesky = std::move(l);
    out.orbitals.reserve(n);
    for (int i = 0; i < n; ++i) {
        VectorXd coeff = linv_t.col(i);
        out.orbitals.push_back(
            linear_combination(phi_hat, std::span<const double>(coeff.data(), n),
                               ctx.round_eps()));
    }
    return out;
}

Eigen::MatrixXd fock_matrix(const ScfContext& ctx,
                            const std::vector<TuckerTensor>& phi_tilde,
                            const std::vector<TuckerTensor>& v_phi_tilde,
                            const std::vector<TuckerTensor>& v_phi_old,
                            const Eigen::MatrixXd& cholesky,
                            const std::vector<double>& lambdas_old, double* asymmetry) {
    const int n = static_cast<int>(phi_tilde.size());
    MatrixXd m1(n, n), m2(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m1(i, j) = inner_h3(ctx, phi_tilde[i], v_phi_tilde[j]);
            m2(i, j) = inner_h3(ctx, phi_tilde[i], v_phi_old[j]);
        }
    MatrixXd linv_t =
        cholesky.transpose().triangularView<Eigen::Upper>().solve(MatrixXd::Identity(n, n));
    VectorXd lam = Eigen::Map<const VectorXd>(lambdas_old.data(), n);
    MatrixXd f = m1 - m2 * linv_t + cholesky.transpose() * lam.asDiagonal() * linv_t;
    const double asym = (f - f.transpose()).norm() / std::max(f.norm(), 1e-300);
    if (asymmetry) *asymmetry = asym;
    return 0.5 * (f + f.transpose());
}

Rotated rotate(const ScfContext& ctx, const std::vector<TuckerTensor>& phi_tilde,
               const Eigen::MatrixXd& fock) {
    const int n = static_cast<int>(phi_tilde.size());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(fock);
    MatrixXd s = eig.eigenvectors();
    // Deterministic column signs: largest-magnitude entry positive.
    for (int c = 0; c < n; ++c) {
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(s(i, c)) > std::abs(s(imax, c))) imax = i;
        if (s(imax, c) < 0.0) s.col(c) = -s.col(c);
    }
    Rotated out;
    out.rotation = s;
    out.lambdas.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
    out.orbitals.reserve(n);
    for (int c = 0; c < n; ++c) {
        VectorXd coeff = s.col(c);
        out.orbitals.push_back(
            linear_combination(phi_tilde, std::span<const double>(coeff.data(), n),
                               ctx.round_eps()));
    }
    return out;
}

double scalar_lambda_update(const ScfContext& ctx, double lambda_old,
                            const TuckerTensor& phi_hat, double gram,
                            const TuckerTensor& v_phi_tilde,
                            const TuckerTensor& v_phi_old) {
    const double num = std::sqrt(gram) * inner_h3(ctx, phi_hat, v_phi_tilde) -
                       inner_h3(ctx, phi_hat, v_phi_old);
    return lambda_old + num / gram;
}

TuckerTensor mix_density(const ScfContext& ctx, const std::vector<TuckerTensor>& mix_in,
                         const std::vector<TuckerTensor>& mix_out) {
    const int m = static_cast<int>(mix_in.size());
    if (m == 0 || mix_in.size() != mix_out.size())
        throw std::invalid_argument("mix_density: empty or mismatched history");
    const double beta = ctx.options().mix_beta;
    auto simple = [&]() {
        const TuckerTensor terms[2] = {mix_in.back(), mix_out.back()};
        const double coeffs[2] = {1.0 - beta, beta};
        return linear_combination(terms, coeffs, ctx.round_eps());
    };
    if (m == 1) return simple();

    // Residuals and their Gram matrix.
    std::vector<TuckerTensor> residuals;
    residuals.reserve(m);
    for (int j = 0; j < m; ++j) {
        const TuckerTensor terms[2] = {mix_out[j], mix_in[j]};
        const double coeffs[2] = {1.0, -1.0};
        residuals.push_back(linear_combination(terms, coeffs, ctx.round_eps()));
    }
    MatrixXd a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            a(i, j) = inner_h3(ctx, residuals[i], residuals[j]);
            a(j, i) = a(i, j);
        }
    // Constrained least squares via a Lagrange multiplier.
    MatrixXd kkt = MatrixXd::Zero(m + 1, m + 1);
    kkt.topLeftCorner(m, m) = 2.0 * a;
    kkt.topRightCorner(m, 1).setOnes();
    kkt.bottomLeftCorner(1, m).setOnes();
    VectorXd rhs = VectorXd::Zero(m + 1);
    rhs(m) = 1.0;
    Eigen::FullPivLU<MatrixXd> lu(kkt);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return simple();
    VectorXd alpha_mu = lu.solve(rhs);
    VectorXd alpha = alpha_mu.head(m);
    if (!alpha.allFinite() || alpha.cwiseAbs().maxCoeff() > 1e3) return simple();

    std::vector<TuckerTensor> terms;
    std::vector<double> coeffs;
    terms.reserve(2 * m);
    for (int j = 0; j < m; ++j) {
        terms.push_back(mix_in[j]);
        coeffs.push_back((1.0 - beta) * alpha(j));
        terms.push_back(mix_out[j]);
        coeffs.push_back(beta * alpha(j));
    }
    return linear_combination(terms, coeffs, ctx.round_eps());
}

SCFState initial_state(const ScfContext& ctx) {
    const Grid& grid = ctx.grid();
    const Molecule& mol = ctx.molecule();
    const int n = grid.n;
    const int want = mol.n_orbitals;

    double zmax = 0.0;
    for (const auto& nuc : mol.nuclei) zmax = std::max(zmax, nuc.charge);

    // Candidate pool: per-nucleus 1s-like Gaussians, then broader s shells,
    // then p-like axis-modulated Gaussians.
    auto gaussian_1d = [&](double center, double c, int moment) {
        VectorXd v(n);
        for (int i = 0; i < n; ++i) {
            const double x = grid.node(i) - center;
            v(i) = (moment == 0 ? 1.0 : x) * std::exp(-c * x * x);
        }
        return v;
    };
    std::vector<TuckerTensor> pool;
    for (int shell = 0; shell < 3 && static_cast<int>(pool.size()) < want + 3; ++shell) {
        for (const auto& nuc : mol.nuclei) {
            const double c0 = std::max(nuc.charge * nuc.charge / 2.0, 0.5);
            const double c = c0 / std::pow(4.0, shell);
            pool.push_back(TuckerTensor::rank_one(gaussian_1d(nuc.position[0], c, 0),
                                                  gaussian_1d(nuc.position[1], c, 0),
                                                  gaussian_1d(nuc.position[2], c, 0)));
            if (shell > 0) {
                pool.push_back(TuckerTensor::rank_one(gaussian_1d(nuc.position[0], c, 1),
                                                      gaussian_1d(nuc.position[1], c, 0),
                                                      gaussian_1d(nuc.position[2], c, 0)));
                pool.push_back(TuckerTensor::rank_one(gaussian_1d(nuc.position[0], c, 0),
                                                      gaussian_1d(nuc.position[1], c, 1),
                                                      gaussian_1d(nuc.position[2], c, 0)));
                pool.push_back(TuckerTensor::rank_one(gaussian_1d(nuc.position[0], c, 0),
                                                      gaussian_1d(nuc.position[1], c, 0),
                                                      gaussian_1d(nuc.position[2], c, 1)));
            }
        }
    }

    // Modified Gram-Schmidt in the h^3 metric, skipping dependent candidates.
    SCFState state;
    for (const auto& cand : pool) {
        if (static_cast<int>(state.orbitals.size()) == want) break;
        TuckerTensor v = cand;
        const double norm0 = std::sqrt(inner_h3(ctx, v, v));
        if (norm0 <= 0.0) continue;
        v = scale(v, 1.0 / norm0);
        for (const auto& prev : state.orbitals) {
            const double proj = inner_h3(ctx, prev, v);
            const TuckerTensor terms[2] = {v, prev};
            const double coeffs[2] = {1.0, -proj};
            v = linear_combination(terms, coeffs, ctx.round_eps() * 0.1);
        }
        const double rem = std::sqrt(std::max(inner_h3(ctx, v, v), 0.0));
        if (rem < 1e-6) continue;
        state.orbitals.push_back(scale(v, 1.0 / rem));
    }
    if (static_cast<int>(state.orbitals.size()) != want)
        throw std::runtime_error("initial_state: could not build enough independent guesses");

    state.lambdas.resize(want);
    for (int i = 0; i < want; ++i)
        state.lambdas[i] = std::min(-0.5 * zmax * zmax / ((i + 1.0) * (i + 1.0)), kLambdaCap);
    state.density = density_of(ctx, state.orbitals);
    return state;
}

EnergyReport total_energy(const ScfContext& ctx, const SCFState& state) {
    const Molecule& mol = ctx.molecule();
    const double eps = ctx.options().eps;
    EnergyReport rep;
    rep.nuclear_repulsion = mol.nuclear_repulsion();
    rep.lambdas = state.lambdas;
    rep.homo = state.lambdas.empty() ? 0.0 : state.lambdas.back();
    for (const auto& phi : state.orbitals) rep.orbital_ranks.push_back(phi.ranks());

    TuckerTensor rho = density_of(ctx, state.orbitals);
    rep.electron_count = ctx.h3() * rho.sum();

    const double occ = mol.occupancy;
    double lambda_sum = 0.0;
    for (double l : state.lambdas) lambda_sum += l;

    if (ctx.options().mode == ScfMode::SingleElectron) {
        // Exchange cancels the Coulomb term exactly; no double counting left.
        rep.total_energy = lambda_sum + rep.nuclear_repulsion;
        return rep;
    }

    TuckerTensor v_h = coulomb_potential(ctx.kernel(), rho, eps);
    rep.hartree_integral = ctx.h3() * inner(rho, v_h);

    if (ctx.options().mode == ScfMode::HartreeFock) {
        ExchangeOperator ex = build_exchange(ctx, state.orbitals);
        const int n = static_cast<int>(state.orbitals.size());
        double x = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                const double term = ctx.h3() * inner(ex.product(i, j), ex.potential(i, j));
                x += (i == j) ? term : 2.0 * term;
            }
        rep.exchange_integral = x;
        rep.total_energy = occ * lambda_sum - 0.5 * rep.hartree_integral +
                           rep.exchange_integral + rep.nuclear_repulsion;
    } else {
        // KS-LDA: E = occ sum(lambda) - E_H/2 + E_xc - int v_xc rho + E_nn.
        CrossOptions copt;
        copt.eps = eps;
        copt.seed = ctx.next_seed();
        TensorFunctionOracle exc_oracle({&rho}, [](int, int, int, const double* v) {
            const double r = std::max(v[0], 0.0);
            return r * lda::xc_energy_density(r);
        });
        rep.xc_energy = ctx.h3() * cross(exc_oracle, copt).sum();
        copt.seed = ctx.next_seed();
        TensorFunctionOracle vxc_oracle({&rho}, [](int, int, int, const double* v) {
            const double r = std::max(v[0], 0.0);
            return r * lda::xc_potential(r);
        });
        rep.xc_potential_integral = ctx.h3() * cross(vxc_oracle, copt).sum();
        rep.total_energy = occ * lambda_sum - 0.5 * rep.hartree_integral + rep.xc_energy -
                           rep.xc_potential_integral + rep.nuclear_repulsion;
    }
    return rep;
}

EnergyReport scf_solve(const ScfContext& ctx, SCFState* state_io) {
    const bool profile = std::getenv("TUCKERGRID_PROFILE") != nullptr;
    auto now = [] { return std::chrono::steady_clock::now(); };
    auto msec = [](auto a, auto b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };
    const ScfOptions& opt = ctx.options();
    const int n_orb = ctx.molecule().n_orbitals;

    SCFState state;
    if (state_io && !state_io->orbitals.empty())
        state = *state_io;
    else
        state = initial_state(ctx);

    std::vector<IterationRecord> trace;
    bool converged = false;
    const bool use_exchange = opt.mode != ScfMode::KohnShamLda;

    for (int iter = 1; iter <= opt.max_iter; ++iter) {
        const long long clamps_before = ctx.xc_clamp_count;
        auto tp0 = now();

        // V^(k) phi^(k), unless cached from the previous rotation.
        if (state.v_phi.empty()) {
            TuckerTensor v_local = local_potential(ctx, state.density);
            if (use_exchange) {
                ExchangeOperator ex = build_exchange(ctx, state.orbitals);
                for (int i = 0; i < n_orb; ++i)
                    state.v_phi.push_back(
                        apply_potential_hf(ctx, v_local, state.orbitals, ex, i));
            } else {
                for (int i = 0; i < n_orb; ++i)
                    state.v_phi.push_back(
                        apply_potential_ks(ctx, v_local, state.density, state.orbitals[i]));
            }
        }

        auto tp1 = now();
        std::vector<TuckerTensor> phi_hat = green_step(ctx, state.lambdas, state.v_phi);
        auto tp2 = now();
        Orthogonalized ortho = orthogonalize(ctx, phi_hat);

        // New density, mixed with the history.
        TuckerTensor rho_out = density_of(ctx, ortho.orbitals);
        state.mix_in.push_back(state.density);
        state.mix_out.push_back(rho_out);
        const int depth = std::max(1, opt.mix_depth);
        while (static_cast<int>(state.mix_in.size()) > depth) {
            state.mix_in.erase(state.mix_in.begin());
            state.mix_out.erase(state.mix_out.begin());
        }
        TuckerTensor rho_new = mix_density(ctx, state.mix_in, state.mix_out);
        auto tp3 = now();

        // V^(k+1) applied to the orthogonalized orbitals.
        auto tq0 = now();
        TuckerTensor v_local_new = local_potential(ctx, rho_new);
        auto tq1 = now();
        std::vector<TuckerTensor> v_phi_tilde;
        if (use_exchange) {
            ExchangeOperator ex = build_exchange(ctx, ortho.orbitals);
            auto tq2 = now();
            for (int i = 0; i < n_orb; ++i)
                v_phi_tilde.push_back(
                    apply_potential_hf(ctx, v_local_new, ortho.orbitals, ex, i));
            if (profile)
                std::cerr << "    vloc=" << msec(tq0, tq1) << " exch=" << msec(tq1, tq2)
                          << " apply=" << msec(tq2, now()) << " ms\n";
        } else {
            for (int i = 0; i < n_orb; ++i)
                v_phi_tilde.push_back(
                    apply_potential_ks(ctx, v_local_new, rho_new, ortho.orbitals[i]));
        }

        auto tp4 = now();
        double asym = 0.0;
        MatrixXd f = fock_matrix(ctx, ortho.orbitals, v_phi_tilde, state.v_phi,
                                 ortho.cholesky, state.lambdas, &asym);
        Rotated rot = rotate(ctx, ortho.orbitals, f);
        auto tp5 = now();

        // Rotate the cached potential applications along with the orbitals.
        std::vector<TuckerTensor> v_phi_new;
        v_phi_new.reserve(n_orb);
        for (int c = 0; c < n_orb; ++c) {
            VectorXd coeff = rot.rotation.col(c);
            v_phi_new.push_back(
                linear_combination(v_phi_tilde, std::span<const double>(coeff.data(), n_orb),
                                   ctx.round_eps()));
        }

        auto tp6 = now();
        if (profile)
            std::cerr << "  profile iter " << iter << ": vphi_k=" << msec(tp0, tp1)
                      << " green+ortho+mix=" << msec(tp1, tp3)
                      << " vphi_new=" << msec(tp3, tp4) << " fock+rot=" << msec(tp4, tp5)
                      << " rotate_cache=" << msec(tp5, tp6) << " ms"
                      << " | ranks: rho=" << rho_new.max_rank()
                      << " vloc=" << v_local_new.max_rank()
                      << " phi~=" << ortho.orbitals[0].max_rank()
                      << " vphi=" << v_phi_tilde[0].max_rank()
                      << " phihat=" << phi_hat[0].max_rank() << "\n";
        IterationRecord rec;
        rec.iteration = iter;
        rec.fock_asymmetry = asym;
        rec.electron_count = ctx.h3() * rho_new.sum();
        rec.xc_clamps = ctx.xc_clamp_count - clamps_before;
        double worst = 0.0;
        for (int i = 0; i < n_orb; ++i) {
            const double change =
                std::abs(rot.lambdas[i] - state.lambdas[i]) /
                std::max(std::abs(rot.lambdas[i]), 1e-300);
            worst = std::max(worst, change);
            rec.lambdas.push_back(rot.lambdas[i]);
            rec.rel_changes.push_back(change);
            rec.orbital_ranks.push_back(rot.orbitals[i].ranks());
        }

        state.orbitals = std::move(rot.orbitals);
        state.lambdas = rot.lambdas;
        for (double& l : state.lambdas)
            if (l >= 0.0) l = kLambdaCap;
        state.density = std::move(rho_new);
        state.v_phi = std::move(v_phi_new);
        state.iteration = iter;
        trace.push_back(std::move(rec));

        if (opt.verbose) {
            std::cerr << "iter " << iter << ": lambda =";
            for (double l : state.lambdas) std::cerr << " " << l;
            std::cerr << "  (max rel change " << worst << ")\n";
        }
        if (worst < opt.eps) {
            converged = true;
            break;
        }
    }

    EnergyReport rep = total_energy(ctx, state);
    rep.iterations = state.iteration;
    rep.converged = converged;
    rep.trace = std::move(trace);
    if (state_io) *state_io = std::move(state);
    return rep;
}

EnergyReport scf_solve(const Molecule& mol, const Grid& grid, const ScfOptions& options,
                       SCFState* state_io) {
    ScfContext ctx(mol, grid, options);
    return scf_solve(ctx, state_io);
}

}  // namespace tuckergrid
