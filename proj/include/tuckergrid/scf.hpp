#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "tuckergrid/convolution.hpp"
#include "tuckergrid/molecule.hpp"
#include "tuckergrid/poisson.hpp"
#include "tuckergrid/tucker.hpp"

namespace tuckergrid {

enum class ScfMode {
    HartreeFock,     // closed shell, doubly occupied
    KohnShamLda,     // closed shell, PZ81 local density approximation
    SingleElectron,  // one orbital, single occupancy (exchange cancels Coulomb)
};

struct ScfOptions {
    ScfMode mode = ScfMode::HartreeFock;
    double eps = 1e-6;        // relative stop criterion on orbital energies
    int max_iter = 60;
    int mix_depth = 5;        // density mixing history m
    double mix_beta = 0.7;    // fixed mixing parameter beta
    std::uint64_t seed = 0;   // base seed for cross pivoting
    std::string kernel_cache_dir;
    bool verbose = false;
};

struct IterationRecord {
    int iteration = 0;
    std::vector<double> lambdas;
    std::vector<double> rel_changes;
    std::vector<std::array<int, 3>> orbital_ranks;
    double fock_asymmetry = 0.0;
    double electron_count = 0.0;   // h^3 sum of the mixed density
    long long xc_clamps = 0;       // sampled negative-density clamps
};

struct EnergyReport {
    double total_energy = 0.0;
    double nuclear_repulsion = 0.0;
    double hartree_integral = 0.0;   // double integral rho rho' / |r-r'|
    double exchange_integral = 0.0;  // HF: double integral |tau|^2 / |r-r'|
    double xc_energy = 0.0;          // KS: E_xc(rho)
    double xc_potential_integral = 0.0;  // KS: integral v_xc rho
    std::vector<double> lambdas;
    double homo = 0.0;
    int iterations = 0;
    bool converged = false;
    double electron_count = 0.0;
    std::vector<std::array<int, 3>> orbital_ranks;
    std::vector<IterationRecord> trace;
};

struct SCFState {
    std::vector<TuckerTensor> orbitals;  // unit h^3-norm, mutually orthonormal
    std::vector<double> lambdas;         // ascending, all negative
    TuckerTensor density;                // mixed input density
    std::vector<TuckerTensor> v_phi;     // cached V^(k) phi_i^(k)
    std::vector<TuckerTensor> mix_in, mix_out;  // mixer history pairs
    int iteration = 0;
};

/// Per-(molecule, grid) solver context: kernel, external potential, rounding
/// policy and the deterministic seed sequence for cross calls.
class ScfContext {
public:
    ScfContext(Molecule mol, Grid grid, ScfOptions options);

    const Molecule& molecule() const { return mol_; }
    const Grid& grid() const { return grid_; }
    const ScfOptions& options() const { return options_; }
    const ConvolutionKernel& kernel() const { return kernel_; }
    const TuckerTensor& v_ext() const { return v_ext_; }
    double h3() const { return grid_.cell_volume(); }
    /// Internal rounding/cross tolerance (eps/10: every tensor-producing step
    /// rounds tighter than the reported accuracy).
    double round_eps() const { return options_.eps / 10.0; }
    std::uint64_t next_seed() const { return seed_counter_++; }

    mutable long long xc_clamp_count = 0;

private:
    Molecule mol_;
    Grid grid_;
    ScfOptions options_;
    ConvolutionKernel kernel_;
    TuckerTensor v_ext_;
    mutable std::uint64_t seed_counter_ = 0;
};

/// L2 inner product on the grid.
inline double inner_h3(const ScfContext& ctx, const TuckerTensor& a, const TuckerTensor& b) {
    return ctx.h3() * inner(a, b);
}

/// occ * sum_i |phi_i|^2 via one cross call.
TuckerTensor density_of(const ScfContext& ctx, const std::vector<TuckerTensor>& orbitals);

/// V_ext + V_coul(rho).
TuckerTensor local_potential(const ScfContext& ctx, const TuckerTensor& rho);

/// Pair potentials W_ij = conv(phi_i phi_j) for the exact-exchange operator;
/// symmetric, so only i <= j is computed. Pair products are kept for the
/// exchange double integral.
struct ExchangeOperator {
    std::vector<std::vector<TuckerTensor>> pair_products;    // [i][j], j <= i
    std::vector<std::vector<TuckerTensor>> pair_potentials;  // [i][j], j <= i
    const TuckerTensor& product(int i, int j) const {
        return i >= j ? pair_products[i][j] : pair_products[j][i];
    }
    const TuckerTensor& potential(int i, int j) const {
        return i >= j ? pair_potentials[i][j] : pair_potentials[j][i];
    }
};
ExchangeOperator build_exchange(const ScfContext& ctx,
                                const std::vector<TuckerTensor>& orbitals);

/// (V_ext + V_coul + V_xc(rho)) phi, with the V_xc product built inside the
/// single cross call (V_xc itself is never formed). Negative density samples
/// are clamped to zero and counted in ctx.xc_clamp_count.
TuckerTensor apply_potential_ks(const ScfContext& ctx, const TuckerTensor& v_local,
                                const TuckerTensor& rho, const TuckerTensor& phi);

/// (V_ext + V_coul) phi_i - sum_j phi_j conv(phi_j phi_i), fused in one cross.
TuckerTensor apply_potential_hf(const ScfContext& ctx, const TuckerTensor& v_local,
                                const std::vector<TuckerTensor>& orbitals,
                                const ExchangeOperator& exchange, int i);

/// One Green step: phi_hat_i = -2 (-Delta_h - 2 lambda_i)^{-1} (V phi_i).
/// Nonnegative lambda estimates are capped at -0.05 hartree to keep the
/// operator positive definite.
std::vector<TuckerTensor> green_step(const ScfContext& ctx,
                                     const std::vector<double>& lambdas,
                                     const std::vector<TuckerTensor>& v_phi);

struct Orthogonalized {
    std::vector<TuckerTensor> orbitals;  // Phi_tilde = Phi_hat L^{-T}
    Eigen::MatrixXd gram;                // B = h^3 Phi_hat^T Phi_hat = L L^T
    Eigen::MatrixXd cholesky;            // L, lower, positive diagonal
};
Orthogonalized orthogonalize(const ScfContext& ctx,
                             const std::vector<TuckerTensor>& phi_hat);

/// Derivative-free Fock matrix
///   F = h^3 [ Phi~^T V+ Phi~ - Phi~^T V Phi L^{-T} ] + L^T Lambda L^{-T},
/// symmetrized; the asymmetry before symmetrization is reported.
Eigen::MatrixXd fock_matrix(const ScfContext& ctx,
                            const std::vector<TuckerTensor>& phi_tilde,
                            const std::vector<TuckerTensor>& v_phi_tilde,
                            const std::vector<TuckerTensor>& v_phi_old,
                            const Eigen::MatrixXd& cholesky,
                            const std::vector<double>& lambdas_old,
                            double* asymmetry = nullptr);

struct Rotated {
    std::vector<TuckerTensor> orbitals;
    std::vector<double> lambdas;  // ascending
    Eigen::MatrixXd rotation;     // S, column signs fixed deterministically
};
Rotated rotate(const ScfContext& ctx, const std::vector<TuckerTensor>& phi_tilde,
               const Eigen::MatrixXd& fock);

/// The one-orbital energy update the block formula reduces to at N = 1:
///   lambda' = lambda + ( sqrt(g) <phi^, W~> - <phi^, V phi> ) h^3 / g,
/// where g = h^3 <phi^, phi^> and W~ = V+ (phi^ / sqrt(g)).
double scalar_lambda_update(const ScfContext& ctx, double lambda_old,
                            const TuckerTensor& phi_hat, double gram,
                            const TuckerTensor& v_phi_tilde,
                            const TuckerTensor& v_phi_old);

/// Anderson-style density mixing with the normalization constraint
/// sum alpha_j = 1; singular mixing systems fall back to plain linear mixing
/// of the latest pair.
TuckerTensor mix_density(const ScfContext& ctx, const std::vector<TuckerTensor>& mix_in,
                         const std::vector<TuckerTensor>& mix_out);

/// Total energy of the current state (orbital-energy form with the
/// double-counting corrections for the chosen mode).
EnergyReport total_energy(const ScfContext& ctx, const SCFState& state);

/// Initial guess: orthogonalized per-nucleus Gaussians with
/// lambda_i = -Z_max^2 / (2 (i+1)^2), capped below -0.05.
SCFState initial_state(const ScfContext& ctx);

/// Block-Green iteration with density mixing until the maximum relative
/// orbital-energy change drops below eps or max_iter is reached. `state_io`
/// (optional) supplies a warm start and receives the final state.
EnergyReport scf_solve(const Molecule& mol, const Grid& grid, const ScfOptions& options,
                       SCFState* state_io = nullptr);
EnergyReport scf_solve(const ScfContext& ctx, SCFState* state_io = nullptr);

}  // namespace tuckergrid
