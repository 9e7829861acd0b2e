#include "tuckergrid/extrapolation.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace tuckergrid {

std::vector<double> aitken(const std::vector<double>& e) {
    if (e.size() < 3) throw std::invalid_argument("aitken: need at least 3 terms");
    std::vector<double> out(e.size() - 2);
    for (std::size_t i = 0; i + 2 < e.size(); ++i) {
        const double d1 = e[i + 2] - e[i + 1];
        const double d2 = e[i + 2] - 2.0 * e[i + 1] + e[i];
        if (std::abs(d2) < 1e-14 * std::abs(e[i + 2]))
            out[i] = e[i + 2];
        else
            out[i] = e[i + 2] - d1 * d1 / d2;
    }
    return out;
}

double aitken_extrapolate(const std::vector<double>& e) {
    if (e.empty()) throw std::invalid_argument("aitken_extrapolate: empty sequence");
    std::vector<double> seq = e;
    const int passes = std::min<std::size_t>(2, (e.size() - 1) / 2);
    for (int p = 0; p < passes && seq.size() >= 3; ++p) {
        // Stop recursing once the guard fires for the latest triple.
        const double d2 = seq.back() - 2.0 * seq[seq.size() - 2] + seq[seq.size() - 3];
        if (std::abs(d2) < 1e-14 * std::abs(seq.back())) break;
        seq = aitken(seq);
    }
    return seq.back();
}

Eigen::MatrixXd prolongation_matrix(const Grid& coarse, const Grid& fine) {
    if (fine.half_width != coarse.half_width)
        throw std::invalid_argument("prolongation: box sizes differ");
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(fine.n, coarse.n);
    const double hc = coarse.step;
    for (int i = 0; i < fine.n; ++i) {
        const double x = fine.node(i);
        // Position between coarse cell centers; values beyond the coarse
        // range interpolate against zero padding.
        const double s = (x - coarse.node(0)) / hc;
        const int k = static_cast<int>(std::floor(s));
        const double w = s - k;
        if (k >= 0 && k < coarse.n) p(i, k) += 1.0 - w;
        if (k + 1 >= 0 && k + 1 < coarse.n) p(i, k + 1) += w;
    }
    return p;
}

SCFState prolong_state(const ScfContext& coarse_ctx, const SCFState& state,
                       const ScfContext& fine_ctx) {
    const Eigen::MatrixXd p = prolongation_matrix(coarse_ctx.grid(), fine_ctx.grid());
    std::vector<TuckerTensor> lifted;
    lifted.reserve(state.orbitals.size());
    for (const auto& phi : state.orbitals) {
        TuckerTensor t = phi.mode_apply(0, p);
        t = t.mode_apply(1, p);
        t = t.mode_apply(2, p);
        lifted.push_back(std::move(t));
    }
    Orthogonalized ortho = orthogonalize(fine_ctx, lifted);
    SCFState fresh;
    fresh.orbitals = std::move(ortho.orbitals);
    fresh.lambdas = state.lambdas;
    fresh.density = density_of(fine_ctx, fresh.orbitals);
    return fresh;
}

LadderResult run_ladder(const Molecule& mol, double box_half_width,
                        const std::vector<int>& grid_sizes, const ScfOptions& options) {
    if (grid_sizes.empty()) throw std::invalid_argument("run_ladder: no grid sizes");
    for (std::size_t i = 1; i < grid_sizes.size(); ++i)
        if (grid_sizes[i] != 2 * grid_sizes[i - 1])
            throw std::invalid_argument("run_ladder: grid sizes must double per level");

    LadderResult result;
    SCFState state;
    std::unique_ptr<ScfContext> prev_ctx;
    for (int n : grid_sizes) {
        Grid grid(box_half_width, n);
        auto ctx = std::make_unique<ScfContext>(mol, grid, options);
        if (prev_ctx) state = prolong_state(*prev_ctx, state, *ctx);

        const auto t0 = std::chrono::steady_clock::now();
        EnergyReport rep = scf_solve(*ctx, &state);
        const auto t1 = std::chrono::steady_clock::now();

        LadderLevel level;
        level.n = n;
        level.seconds = std::chrono::duration<double>(t1 - t0).count();
        level.seconds_per_iteration =
            rep.iterations > 0 ? level.seconds / rep.iterations : level.seconds;
        level.report = std::move(rep);
        const bool ok = level.report.converged;
        result.levels.push_back(std::move(level));
        if (!ok) {
            result.complete = false;
            return result;
        }
        prev_ctx = std::move(ctx);
    }
    result.complete = true;

    std::vector<double> energies, homos;
    for (const auto& level : result.levels) {
        energies.push_back(level.report.total_energy);
        homos.push_back(level.report.homo);
    }
    result.extrapolated_energy =
        energies.size() >= 3 ? aitken_extrapolate(energies) : energies.back();
    result.extrapolated_homo = homos.size() >= 3 ? aitken_extrapolate(homos) : homos.back();
    for (std::size_t i = 0; i + 2 < energies.size(); ++i) {
        const double num = energies[i + 1] - energies[i];
        const double den = energies[i + 2] - energies[i + 1];
        result.empirical_orders.push_back(
            den != 0.0 ? std::log2(std::abs(num / den)) : 0.0);
    }
    return result;
}

}  // namespace tuckergrid
